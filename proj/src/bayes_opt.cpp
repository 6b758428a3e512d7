#include "hotspot/bayes_opt.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "hotspot/errors.hpp"
#include "hotspot/rng.hpp"

namespace hotspot::bo {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % static_cast<std::uint64_t>(base)) * factor;
    index /= static_cast<std::uint64_t>(base);
    factor *= inv_base;
  }
  return value;
}

double matern52(double r) {
  const double s = std::sqrt(5.0) * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

struct Surrogate {
  Eigen::MatrixXd x;  // n x dim, normalized
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd alpha;
  double y_mean = 0.0;
  double y_scale = 1.0;
  double lengthscale = 0.25;
  double noise = 1e-6;

  void train(const Eigen::MatrixXd& points, const Eigen::VectorXd& y) {
    x = points;
    y_mean = y.mean();
    const double sd = std::sqrt((y.array() - y_mean).square().sum() /
                                std::max<Eigen::Index>(1, y.size() - 1));
    y_scale = sd > 1e-12 ? sd : 1.0;
    const Eigen::VectorXd ys = (y.array() - y_mean) / y_scale;
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double r = (points.row(i) - points.row(j)).norm() / lengthscale;
        gram(i, j) = gram(j, i) = matern52(r);
      }
    }
    double jitter = noise;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd k = gram + jitter * Eigen::MatrixXd::Identity(n, n);
      chol.compute(k);
      if (chol.info() == Eigen::Success) {
        alpha = chol.solve(ys);
        return;
      }
      jitter *= 10.0;
    }
    throw NumericalError("GP surrogate factorization failed even with jitter");
  }

  std::pair<double, double> predict(const Eigen::VectorXd& q) const {
    const Eigen::Index n = x.rows();
    Eigen::VectorXd kv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      kv(i) = matern52((x.row(i).transpose() - q).norm() / lengthscale);
    }
    const double mean = kv.dot(alpha);
    const Eigen::VectorXd v = chol.matrixL().solve(kv);
    const double var = std::max(0.0, 1.0 + noise - v.squaredNorm());
    return {y_mean + y_scale * mean, y_scale * std::sqrt(var)};
  }
};

double expected_improvement(const Surrogate& gp, const Eigen::VectorXd& q, double best) {
  const auto [mean, sd] = gp.predict(q);
  constexpr double kXi = 0.01;
  if (sd < 1e-12) return std::max(0.0, mean - best - kXi);
  const double z = (mean - best - kXi) / sd;
  return sd * (z * norm_cdf(z) + norm_pdf(z));
}

}  // namespace

Eigen::VectorXd halton_point(std::uint64_t index, int dim) {
  Eigen::VectorXd p(dim);
  for (int j = 0; j < dim; ++j) p(j) = radical_inverse(index, kPrimes[j % 20]);
  return p;
}

int BoHistory::best_index() const {
  int best = 0;
  for (size_t i = 1; i < ys.size(); ++i) {
    if (ys[i] > ys[static_cast<size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

BoHistory bo_maximize(const Objective& f, const std::vector<std::pair<double, double>>& bounds,
                      int n_init, int n_iter, std::uint64_t seed) {
  const int dim = static_cast<int>(bounds.size());
  if (dim == 0 || dim > 20) throw ValidationError("BO needs 1..20 bounded dimensions");
  for (const auto& [lo, hi] : bounds) {
    if (!(hi > lo)) throw ValidationError("degenerate BO bounds: hi must exceed lo");
  }
  if (n_init < 2) throw ValidationError("BO needs at least 2 initial evaluations");
  if (n_iter < 0) throw ValidationError("BO iteration count must be non-negative");

  const auto denormalize = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) {
      x(j) = bounds[static_cast<size_t>(j)].first +
             u(j) * (bounds[static_cast<size_t>(j)].second - bounds[static_cast<size_t>(j)].first);
    }
    return x;
  };

  BoHistory history;
  Eigen::MatrixXd us(n_init + n_iter, dim);
  Eigen::VectorXd ys(n_init + n_iter);
  const std::uint64_t halton_start = 17 + (derive_seed(seed, "bo-halton") % 4096);
  for (int i = 0; i < n_init; ++i) {
    const Eigen::VectorXd u = halton_point(halton_start + static_cast<std::uint64_t>(i), dim);
    us.row(i) = u;
    const Eigen::VectorXd x = denormalize(u);
    ys(i) = f(x);
    history.xs.push_back(x);
    history.ys.push_back(ys(i));
  }

  Rng cand_rng(derive_seed(seed, "bo-candidates"));
  const int n_candidates = 512 + 128 * dim;
  for (int round = 0; round < n_iter; ++round) {
    const int n_obs = n_init + round;
    Surrogate gp;
    gp.train(us.topRows(n_obs), ys.head(n_obs));
    const double best = ys.head(n_obs).maxCoeff();

    // Quasi-random sweep plus jittered restarts near the incumbent.
    Eigen::VectorXd best_u;
    double best_ei = -1.0;
    const std::uint64_t sweep_start =
        derive_seed(seed, "bo-sweep-" + std::to_string(round)) % 100000;
    for (int c = 0; c < n_candidates; ++c) {
      const Eigen::VectorXd u =
          halton_point(sweep_start + 23 + static_cast<std::uint64_t>(c), dim);
      const double ei = expected_improvement(gp, u, best);
      if (ei > best_ei) {
        best_ei = ei;
        best_u = u;
      }
    }
    {
      int best_obs = 0;
      for (int i = 1; i < n_obs; ++i) {
        if (ys(i) > ys(best_obs)) best_obs = i;
      }
      for (int r = 0; r < 8; ++r) {
        Eigen::VectorXd u = us.row(best_obs).transpose();
        for (int j = 0; j < dim; ++j) {
          u(j) = std::clamp(u(j) + 0.05 * cand_rng.normal(), 0.0, 1.0);
        }
        const double ei = expected_improvement(gp, u, best);
        if (ei > best_ei) {
          best_ei = ei;
          best_u = u;
        }
      }
    }
    // Local pattern-search refinement.
    double step = 0.05;
    while (step > 1e-3) {
      bool improved = false;
      for (int j = 0; j < dim; ++j) {
        for (const double dir : {+1.0, -1.0}) {
          Eigen::VectorXd u = best_u;
          u(j) = std::clamp(u(j) + dir * step, 0.0, 1.0);
          const double ei = expected_improvement(gp, u, best);
          if (ei > best_ei) {
            best_ei = ei;
            best_u = u;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    // Avoid re-evaluating an existing point exactly; fall back to a fresh
    // quasi-random filler if the acquisition collapsed onto one.
    bool duplicate = false;
    for (int i = 0; i < n_obs; ++i) {
      if ((us.row(i).transpose() - best_u).norm() < 1e-9) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      best_u = halton_point(sweep_start + 7777 + static_cast<std::uint64_t>(round), dim);
    }

    us.row(n_obs) = best_u;
    const Eigen::VectorXd x = denormalize(best_u);
    ys(n_obs) = f(x);
    history.xs.push_back(x);
    history.ys.push_back(ys(n_obs));
  }
  return history;
}

}  // namespace hotspot::bo
