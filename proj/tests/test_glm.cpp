#include <doctest.h>

#include <cmath>

#include "hotspot/errors.hpp"
#include "hotspot/poisson_glm.hpp"
#include "hotspot/rng.hpp"

using namespace hotspot;
using glm::DesignMatrix;
using glm::ModelParams;
using glm::OptimizerConfig;

namespace {

DesignMatrix random_design(int n, int p, int d, std::uint64_t seed, double count_mean = 1.0) {
  Rng rng(seed);
  DesignMatrix design;
  design.kde.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) design.kde(i, j) = std::abs(rng.normal()) * 0.7;
  }
  design.rff.resize(n, 2 * d);
  const double scale = d > 0 ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2 * d; ++j) design.rff(i, j) = rng.uniform(-scale, scale);
  }
  design.counts.resize(n);
  for (int i = 0; i < n; ++i) design.counts(i) = static_cast<double>(rng.poisson(count_mean));
  return design;
}

ModelParams random_params(int p, int d, std::uint64_t seed, double scale = 0.4) {
  Rng rng(seed);
  ModelParams params;
  params.gamma.resize(p);
  for (int j = 0; j < p; ++j) params.gamma(j) = scale * rng.normal();
  params.beta.resize(2 * d);
  for (int j = 0; j < 2 * d; ++j) params.beta(j) = scale * rng.normal();
  return params;
}

// Textbook restatement of the penalized objective, kept deliberately naive.
double objective_oracle(const ModelParams& params, const DesignMatrix& design) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < design.counts.size(); ++i) {
    double eta = 0.0;
    for (Eigen::Index j = 0; j < design.kde.cols(); ++j) {
      eta += design.kde(i, j) * params.gamma(j);
    }
    for (Eigen::Index j = 0; j < design.rff.cols(); ++j) {
      eta += design.rff(i, j) * params.beta(j);
    }
    total += design.counts(i) * eta - std::exp(std::min(eta, 30.0));
  }
  double l1 = 0.0, l2 = 0.0;
  for (Eigen::Index j = 0; j < params.gamma.size(); ++j) {
    l1 += std::abs(params.gamma(j));
    l2 += params.gamma(j) * params.gamma(j);
  }
  for (Eigen::Index j = 0; j < params.beta.size(); ++j) {
    l1 += std::abs(params.beta(j));
    l2 += params.beta(j) * params.beta(j);
  }
  return total - params.l1_weight * l1 - params.l2_weight * l2;
}

}  // namespace

TEST_CASE("objective closed-form spot checks") {
  DesignMatrix design;
  design.kde.resize(4, 1);
  design.kde.setOnes();
  design.rff.resize(4, 0);
  design.counts = Eigen::VectorXd::Zero(4);
  ModelParams zero;
  zero.gamma = Eigen::VectorXd::Zero(1);
  CHECK(glm::objective(zero, design) == doctest::Approx(-4.0).epsilon(1e-15));

  DesignMatrix two;
  two.kde.resize(2, 1);
  two.kde.setOnes();
  two.rff.resize(2, 0);
  two.counts.resize(2);
  two.counts << 2.0, 0.0;
  CHECK(glm::objective(zero, two) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("objective matches an independent naive implementation to 1e-12") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DesignMatrix design = random_design(40, 3, 6, 100 + seed, 2.0);
    ModelParams params = random_params(3, 6, 200 + seed);
    params.l1_weight = 0.3;
    params.l2_weight = 0.05;
    const double got = glm::objective(params, design);
    const double want = objective_oracle(params, design);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("gradient vanishes at zero params when all counts are one") {
  DesignMatrix design = random_design(30, 2, 4, 5);
  design.counts.setOnes();
  ModelParams zero;
  zero.gamma = Eigen::VectorXd::Zero(2);
  zero.beta = Eigen::VectorXd::Zero(8);
  const auto [dg, db] = glm::gradient(zero, design);
  CHECK(dg.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(db.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("analytic gradient agrees with central finite differences") {
  // 20 random instances, n=50, p=3, d=8, a=0, h=1e-5, 1e-5 relative tolerance.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DesignMatrix design = random_design(50, 3, 8, 300 + seed, 1.0);
    ModelParams params = random_params(3, 8, 400 + seed);
    params.l1_weight = 0.0;
    params.l2_weight = (seed % 2 == 0) ? 0.0 : 0.1;
    const auto [dg, db] = glm::gradient(params, design);
    const double h = 1e-5;
    Eigen::VectorXd packed(3 + 16);
    packed << params.gamma, params.beta;
    for (Eigen::Index j = 0; j < packed.size(); ++j) {
      ModelParams plus = params, minus = params;
      Eigen::VectorXd& pv = j < 3 ? plus.gamma : plus.beta;
      Eigen::VectorXd& mv = j < 3 ? minus.gamma : minus.beta;
      const Eigen::Index local = j < 3 ? j : j - 3;
      pv(local) += h;
      mv(local) -= h;
      const double fd =
          (glm::objective(plus, design) - glm::objective(minus, design)) / (2.0 * h);
      const double analytic = j < 3 ? dg(j) : db(j - 3);
      CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST_CASE("l2 contribution to the gradient is exactly linear") {
  const DesignMatrix design = random_design(25, 2, 3, 17);
  ModelParams params = random_params(2, 3, 18);
  params.l1_weight = 0.0;
  params.l2_weight = 0.0;
  const auto [dg0, db0] = glm::gradient(params, design);
  params.l2_weight = 0.7;
  const auto [dg1, db1] = glm::gradient(params, design);
  for (Eigen::Index j = 0; j < dg0.size(); ++j) {
    CHECK(dg1(j) - dg0(j) == doctest::Approx(-2.0 * 0.7 * params.gamma(j)).epsilon(1e-12));
  }
  for (Eigen::Index j = 0; j < db0.size(); ++j) {
    CHECK(db1(j) - db0(j) == doctest::Approx(-2.0 * 0.7 * params.beta(j)).epsilon(1e-12));
  }
}

TEST_CASE("fit recovers the closed-form constant-covariate MLE") {
  // One KDE column of ones, no RFF block: optimum is exp(gamma) = mean(o).
  DesignMatrix design;
  const int n = 40;
  design.kde = Eigen::MatrixXd::Ones(n, 1);
  design.rff.resize(n, 0);
  design.counts.resize(n);
  Rng rng(77);
  for (int i = 0; i < n; ++i) design.counts(i) = static_cast<double>(rng.poisson(3.0));
  const double mean = design.counts.mean();
  REQUIRE(mean > 0.0);
  const auto [params, report] = glm::fit(design, 0.0, 0.0);
  CHECK(report.converged);
  CHECK(std::abs(std::exp(params.gamma(0)) - mean) <= 1e-6);
}

TEST_CASE("overwhelming l1 penalty zeroes every coefficient") {
  const DesignMatrix design = random_design(30, 2, 4, 31, 2.0);
  const double huge = 1e4 * static_cast<double>(design.rows());
  const auto [params, report] = glm::fit(design, huge, 0.0);
  CHECK(params.gamma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(params.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit beats ten thousand random parameter draws") {
  const DesignMatrix design = random_design(30, 2, 4, 51, 1.5);
  const auto [params, report] = glm::fit(design, 0.0, 0.0);
  ModelParams fitted = params;
  const double best_fit = glm::objective(fitted, design);
  Rng rng(52);
  double best_random = -1e300;
  for (int trial = 0; trial < 10000; ++trial) {
    const ModelParams draw = random_params(2, 4, rng.next_u64(), 0.8);
    best_random = std::max(best_random, glm::objective(draw, design));
  }
  CHECK(best_fit >= best_random);
}

TEST_CASE("objective trace is non-decreasing across accepted steps") {
  const DesignMatrix design = random_design(60, 3, 5, 61, 2.0);
  const auto [params, report] = glm::fit(design, 0.2, 0.1);
  REQUIRE(report.objective_trace.size() > 1);
  for (size_t i = 1; i < report.objective_trace.size(); ++i) {
    CHECK(report.objective_trace[i] >= report.objective_trace[i - 1]);
  }
}

TEST_CASE("strictly concave fits agree from different starts") {
  const DesignMatrix design = random_design(50, 2, 6, 71, 1.0);
  OptimizerConfig warm;
  ModelParams start = random_params(2, 6, 72, 0.5);
  warm.init = std::make_pair(start.gamma, start.beta);
  const auto [p_zero, r_zero] = glm::fit(design, 0.0, 0.5);
  const auto [p_warm, r_warm] = glm::fit(design, 0.0, 0.5, warm);
  CHECK(std::abs(r_zero.objective_value - r_warm.objective_value) <= 1e-6);
}

TEST_CASE("l1 path: coefficient mass shrinks as the penalty grows") {
  const DesignMatrix design = random_design(60, 3, 5, 81, 2.0);
  double prev_norm = 1e300;
  for (const double a : {0.0, 0.5, 2.0, 8.0, 32.0}) {
    const auto [params, report] = glm::fit(design, a, 0.0);
    const double norm = params.gamma.lpNorm<1>() + params.beta.lpNorm<1>();
    CHECK(norm <= prev_norm + 1e-9);
    prev_norm = norm;
  }
}

TEST_CASE("predict maps zero params to unit intensity and is deterministic") {
  const DesignMatrix design = random_design(20, 2, 3, 91);
  ModelParams zero;
  zero.gamma = Eigen::VectorXd::Zero(2);
  zero.beta = Eigen::VectorXd::Zero(6);
  const Eigen::VectorXd ones = glm::predict(zero, design);
  for (Eigen::Index i = 0; i < ones.size(); ++i) CHECK(ones(i) == 1.0);

  // eta = ln 5 via a single unit covariate
  DesignMatrix unit;
  unit.kde = Eigen::MatrixXd::Ones(1, 1);
  unit.rff.resize(1, 0);
  unit.counts = Eigen::VectorXd::Zero(1);
  ModelParams ln5;
  ln5.gamma = Eigen::VectorXd::Constant(1, std::log(5.0));
  CHECK(glm::predict(ln5, unit)(0) == doctest::Approx(5.0).epsilon(1e-12));

  // refit on identical data gives bitwise identical predictions
  const auto [pa, ra] = glm::fit(design, 0.1, 0.1);
  const auto [pb, rb] = glm::fit(design, 0.1, 0.1);
  const Eigen::VectorXd da = glm::predict(pa, design);
  const Eigen::VectorXd db = glm::predict(pb, design);
  CHECK(da == db);
}

TEST_CASE("clamped linear predictors are flagged, not silent") {
  DesignMatrix design;
  design.kde = Eigen::MatrixXd::Constant(3, 1, 100.0);
  design.rff.resize(3, 0);
  design.counts = Eigen::VectorXd::Constant(3, 5.0);
  OptimizerConfig cfg;
  ModelParams big;
  big.gamma = Eigen::VectorXd::Constant(1, 1.0);  // eta = 100 at the start
  big.beta = Eigen::VectorXd(0);
  cfg.init = std::make_pair(big.gamma, big.beta);
  cfg.max_epochs = 3;
  const auto [params, report] = glm::fit(design, 0.0, 0.0, cfg);
  CHECK(report.eta_clamped);
}

TEST_CASE("design validation rejects inconsistent shapes") {
  DesignMatrix design;
  design.kde = Eigen::MatrixXd::Ones(3, 1);
  design.rff = Eigen::MatrixXd::Ones(2, 2);
  design.counts = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(design.validate(), ValidationError);
  design.rff.resize(3, 0);
  design.counts(1) = -1.0;
  CHECK_THROWS_AS(design.validate(), ValidationError);
  CHECK_THROWS_AS(glm::fit(design, -0.1, 0.0), ValidationError);
}
