#include "hotspot/rff_features.hpp"

#include <cmath>
#include <fstream>

#include "hotspot/errors.hpp"
#include "hotspot/rng.hpp"

namespace hotspot::rff {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::matern52 ? "matern52" : "squared_exponential";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern52") return KernelFamily::matern52;
  if (name == "squared_exponential") return KernelFamily::squared_exponential;
  throw ValidationError("unknown kernel family '" + name +
                        "' (expected matern52 or squared_exponential)");
}

void RffConfig::validate() const {
  if (n_frequencies <= 0) throw ValidationError("RFF frequency count d must be positive");
  if (!(spatial_lengthscale_ft > 0.0) || !(temporal_lengthscale_days > 0.0)) {
    throw ValidationError("RFF lengthscales must be positive");
  }
}

FrequencyMatrix sample_frequencies(const RffConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const int d = config.n_frequencies;
  Eigen::MatrixXd omegas(d, 3);
  for (int k = 0; k < d; ++k) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double z3 = rng.normal();
    double mix = 1.0;
    if (config.kernel_family == KernelFamily::matern52) {
      mix = std::sqrt(5.0 / rng.chi_squared(5));
    }
    omegas(k, 0) = mix * z1 / config.spatial_lengthscale_ft;
    omegas(k, 1) = mix * z2 / config.spatial_lengthscale_ft;
    omegas(k, 2) = mix * z3 / config.temporal_lengthscale_days;
  }
  return FrequencyMatrix{std::move(omegas), config};
}

Eigen::MatrixXd featurize(const Eigen::MatrixXd& points, const FrequencyMatrix& freqs) {
  if (points.cols() != 3 || freqs.omegas.cols() != 3) {
    throw ValidationError("featurize expects n x 3 points and d x 3 frequencies");
  }
  const Eigen::Index d = freqs.omegas.rows();
  const Eigen::MatrixXd proj = points * freqs.omegas.transpose();
  Eigen::MatrixXd phi(points.rows(), 2 * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  phi.leftCols(d) = proj.array().cos() * scale;
  phi.rightCols(d) = proj.array().sin() * scale;
  return phi;
}

double kernel_closed_form(const RffConfig& config, double dx, double dy, double dt) {
  const double sx = dx / config.spatial_lengthscale_ft;
  const double sy = dy / config.spatial_lengthscale_ft;
  const double st = dt / config.temporal_lengthscale_days;
  const double r2 = sx * sx + sy * sy + st * st;
  if (config.kernel_family == KernelFamily::squared_exponential) {
    return std::exp(-0.5 * r2);
  }
  const double r = std::sqrt(r2);
  const double sqrt5_r = std::sqrt(5.0) * r;
  return (1.0 + sqrt5_r + 5.0 * r2 / 3.0) * std::exp(-sqrt5_r);
}

std::vector<ApproximationRow> approximation_report(const RffConfig& base, int n_pairs,
                                                   std::span<const int> d_values, int n_seeds) {
  {
    RffConfig probe = base;  // base.n_frequencies is unused; every row sets its own d
    probe.n_frequencies = 1;
    probe.validate();
  }
  if (n_pairs <= 0 || n_seeds <= 0) {
    throw ValidationError("approximation_report needs positive n_pairs and n_seeds");
  }

  // One fixed pair set across every d and seed, spanning a few lengthscales.
  Rng pair_rng(derive_seed(base.seed, "rff-report-pairs"));
  Eigen::MatrixXd a(n_pairs, 3), b(n_pairs, 3);
  for (int i = 0; i < n_pairs; ++i) {
    for (int j = 0; j < 2; ++j) {
      a(i, j) = pair_rng.uniform(0.0, 3.0 * base.spatial_lengthscale_ft);
      b(i, j) = pair_rng.uniform(0.0, 3.0 * base.spatial_lengthscale_ft);
    }
    a(i, 2) = pair_rng.uniform(0.0, 3.0 * base.temporal_lengthscale_days);
    b(i, 2) = pair_rng.uniform(0.0, 3.0 * base.temporal_lengthscale_days);
  }
  Eigen::VectorXd truth(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    truth(i) =
        kernel_closed_form(base, a(i, 0) - b(i, 0), a(i, 1) - b(i, 1), a(i, 2) - b(i, 2));
  }

  std::vector<ApproximationRow> rows;
  for (const int d : d_values) {
    ApproximationRow row;
    row.d = d;
    double mean_acc = 0.0;
    double max_err = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      RffConfig cfg = base;
      cfg.n_frequencies = d;
      cfg.seed = derive_seed(base.seed, "rff-report-draw-" + std::to_string(s));
      const FrequencyMatrix freqs = sample_frequencies(cfg);
      const Eigen::MatrixXd phi_a = featurize(a, freqs);
      const Eigen::MatrixXd phi_b = featurize(b, freqs);
      double seed_sum = 0.0;
      for (int i = 0; i < n_pairs; ++i) {
        const double approx = phi_a.row(i).dot(phi_b.row(i));
        const double err = std::abs(approx - truth(i));
        seed_sum += err;
        max_err = std::max(max_err, err);
      }
      mean_acc += seed_sum / n_pairs;
    }
    row.mean_abs_err = mean_acc / n_seeds;
    row.max_abs_err = max_err;
    rows.push_back(row);
  }
  return rows;
}

void write_frequencies_csv(const FrequencyMatrix& freqs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write frequency CSV: " + path);
  out << "# kernel_family=" << to_string(freqs.config.kernel_family)
      << " d=" << freqs.config.n_frequencies
      << " spatial_lengthscale_ft=" << freqs.config.spatial_lengthscale_ft
      << " temporal_lengthscale_days=" << freqs.config.temporal_lengthscale_days
      << " seed=" << freqs.config.seed << "\n";
  out << "omega_x,omega_y,omega_t\n";
  char buf[128];
  for (Eigen::Index k = 0; k < freqs.omegas.rows(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", freqs.omegas(k, 0), freqs.omegas(k, 1),
                  freqs.omegas(k, 2));
    out << buf;
  }
}

}  // namespace hotspot::rff
