#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hotspot/errors.hpp"
#include "hotspot/rff_features.hpp"
#include "hotspot/rng.hpp"

using namespace hotspot;
using rff::KernelFamily;
using rff::RffConfig;

namespace {

RffConfig base_config(int d, KernelFamily family, std::uint64_t seed = 7) {
  return RffConfig{d, 500.0, 30.0, family, seed};
}

}  // namespace

TEST_CASE("frequency sampling is deterministic and lengthscale-covariant") {
  const RffConfig cfg = base_config(64, KernelFamily::matern52);
  const auto a = rff::sample_frequencies(cfg);
  const auto b = rff::sample_frequencies(cfg);
  CHECK(a.omegas == b.omegas);

  RffConfig doubled = cfg;
  doubled.spatial_lengthscale_ft *= 2.0;
  doubled.temporal_lengthscale_days *= 2.0;
  const auto c = rff::sample_frequencies(doubled);
  for (Eigen::Index i = 0; i < a.omegas.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(c.omegas(i, j) == a.omegas(i, j) / 2.0);  // exact halving
    }
  }
}

TEST_CASE("matern52 spectral draw reproduces the closed-form kernel") {
  // Monte Carlo with d = 1e5 against (1 + sqrt5 r + 5r^2/3) exp(-sqrt5 r).
  const RffConfig cfg = base_config(100000, KernelFamily::matern52, 11);
  const auto freqs = rff::sample_frequencies(cfg);
  for (const double ratio : {0.1, 0.5, 1.0, 2.0}) {
    const double r_ft = ratio * cfg.spatial_lengthscale_ft;
    Eigen::MatrixXd pts(2, 3);
    pts << 0, 0, 0, r_ft, 0, 0;
    const Eigen::MatrixXd phi = rff::featurize(pts, freqs);
    const double approx = phi.row(0).dot(phi.row(1));
    const double sqrt5r = std::sqrt(5.0) * ratio;
    const double closed = (1.0 + sqrt5r + 5.0 * ratio * ratio / 3.0) * std::exp(-sqrt5r);
    CHECK(std::abs(approx - closed) <= 0.01);
    CHECK(closed == doctest::Approx(rff::kernel_closed_form(cfg, r_ft, 0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("featurize identities") {
  SUBCASE("unit self inner product, exactly") {
    const auto freqs = rff::sample_frequencies(base_config(33, KernelFamily::matern52));
    Eigen::MatrixXd pts(3, 3);
    pts << 1.0, 2.0, 3.0, -500.0, 900.0, 17.0, 0.0, 0.0, 0.0;
    const Eigen::MatrixXd phi = rff::featurize(pts, freqs);
    CHECK(phi.cols() == 66);
    for (int i = 0; i < 3; ++i) {
      CHECK(phi.row(i).dot(phi.row(i)) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("d = 1 with zero frequency gives [1, 0] rows") {
    rff::FrequencyMatrix freqs;
    freqs.omegas = Eigen::MatrixXd::Zero(1, 3);
    freqs.config = base_config(1, KernelFamily::squared_exponential);
    Eigen::MatrixXd pts(2, 3);
    pts << 5.0, 6.0, 7.0, -1.0, 0.0, 4.0;
    const Eigen::MatrixXd phi = rff::featurize(pts, freqs);
    for (int i = 0; i < 2; ++i) {
      CHECK(phi(i, 0) == 1.0);
      CHECK(phi(i, 1) == 0.0);
      CHECK(phi.row(0).dot(phi.row(i)) == 1.0);
    }
  }
  SUBCASE("dimension mismatch throws") {
    const auto freqs = rff::sample_frequencies(base_config(4, KernelFamily::matern52));
    CHECK_THROWS_AS(rff::featurize(Eigen::MatrixXd::Zero(2, 2), freqs), ValidationError);
  }
}

TEST_CASE("squared-exponential pairs stay within the Monte Carlo band") {
  // 20 pairs, d = 2000, 30 seeds; |Phi_i . Phi_j - k| <= 0.06 throughout.
  Rng rng(500);
  Eigen::MatrixXd a(20, 3), b(20, 3);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 2; ++j) {
      a(i, j) = rng.uniform(0.0, 1500.0);
      b(i, j) = rng.uniform(0.0, 1500.0);
    }
    a(i, 2) = rng.uniform(0.0, 90.0);
    b(i, 2) = rng.uniform(0.0, 90.0);
  }
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RffConfig cfg = base_config(2000, KernelFamily::squared_exponential, 900 + seed);
    const auto freqs = rff::sample_frequencies(cfg);
    const Eigen::MatrixXd phi_a = rff::featurize(a, freqs);
    const Eigen::MatrixXd phi_b = rff::featurize(b, freqs);
    for (int i = 0; i < 20; ++i) {
      const double k = rff::kernel_closed_form(cfg, a(i, 0) - b(i, 0), a(i, 1) - b(i, 1),
                                               a(i, 2) - b(i, 2));
      const double approx = phi_a.row(i).dot(phi_b.row(i));
      CHECK(std::abs(approx - k) <= 0.06);
      CHECK(std::abs(approx) <= 1.0 + 1e-12);  // unit rows bound every estimate
    }
  }
}

TEST_CASE("stationarity: inner products depend on displacements only") {
  const auto freqs = rff::sample_frequencies(base_config(256, KernelFamily::matern52, 3));
  Eigen::MatrixXd pts(2, 3);
  pts << 100.0, 200.0, 10.0, 700.0, -150.0, 40.0;
  const double base = rff::featurize(pts, freqs).row(0).dot(
      rff::featurize(pts, freqs).row(1));
  Eigen::MatrixXd shifted = pts;
  shifted.col(0).array() += 10000.0;
  shifted.col(1).array() += -2500.0;
  shifted.col(2).array() += 365.0;
  const Eigen::MatrixXd phi = rff::featurize(shifted, freqs);
  CHECK(phi.row(0).dot(phi.row(1)) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("entry magnitudes stay below 1/sqrt(d)") {
  const int d = 37;
  const auto freqs = rff::sample_frequencies(base_config(d, KernelFamily::matern52, 21));
  Rng rng(22);
  Eigen::MatrixXd pts(50, 3);
  for (int i = 0; i < 50; ++i) {
    pts(i, 0) = rng.uniform(-5000.0, 5000.0);
    pts(i, 1) = rng.uniform(-5000.0, 5000.0);
    pts(i, 2) = rng.uniform(0.0, 2000.0);
  }
  const Eigen::MatrixXd phi = rff::featurize(pts, freqs);
  CHECK(phi.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(static_cast<double>(d)) + 1e-15);
}

TEST_CASE("approximation report errors shrink with d") {
  const RffConfig base = base_config(0, KernelFamily::matern52, 40);
  const std::vector<int> d_values = {5, 50, 500};
  const auto rows = rff::approximation_report(base, 200, d_values, 30);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean_abs_err > rows[1].mean_abs_err);
  CHECK(rows[1].mean_abs_err > rows[2].mean_abs_err);
  for (const auto& row : rows) CHECK(row.max_abs_err >= row.mean_abs_err);
}

TEST_CASE("coincident points have zero approximation error for any d") {
  for (const int d : {3, 17, 101}) {
    const auto freqs = rff::sample_frequencies(base_config(d, KernelFamily::matern52, 5));
    Eigen::MatrixXd pts(1, 3);
    pts << 321.0, -654.0, 9.0;
    const Eigen::MatrixXd phi = rff::featurize(pts, freqs);
    CHECK(std::abs(phi.row(0).dot(phi.row(0)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("far pairs decay toward zero for both kernel families") {
  for (const KernelFamily family : {KernelFamily::matern52, KernelFamily::squared_exponential}) {
    const RffConfig cfg = base_config(4000, family, 77);
    const auto freqs = rff::sample_frequencies(cfg);
    Eigen::MatrixXd pts(2, 3);
    pts << 0, 0, 0, 20.0 * cfg.spatial_lengthscale_ft, 0, 0;  // r = 20 lengthscales
    const Eigen::MatrixXd phi = rff::featurize(pts, freqs);
    CHECK(rff::kernel_closed_form(cfg, pts(1, 0), 0, 0) <= 1e-6);
    CHECK(std::abs(phi.row(0).dot(phi.row(1))) <= 3.0 / std::sqrt(4000.0));
  }
}

TEST_CASE("frequency CSV export carries the provenance header") {
  const auto freqs = rff::sample_frequencies(base_config(3, KernelFamily::matern52, 123));
  const std::string path = "/tmp/hotspot_freqs_test.csv";
  rff::write_frequencies_csv(freqs, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("seed=123") != std::string::npos);
  CHECK(line.find("matern52") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "omega_x,omega_y,omega_t");
  std::remove(path.c_str());
}
