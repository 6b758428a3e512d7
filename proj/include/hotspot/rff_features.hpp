#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hotspot::rff {

enum class KernelFamily { matern52, squared_exponential };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);  // throws on unknown

struct RffConfig {
  int n_frequencies = 0;  // d; the feature map has 2d columns (cos/sin pairs)
  double spatial_lengthscale_ft = 0.0;
  double temporal_lengthscale_days = 0.0;
  KernelFamily kernel_family = KernelFamily::matern52;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FrequencyMatrix {
  Eigen::MatrixXd omegas;  // d x 3, frequencies for (x, y, t)
  RffConfig config;        // provenance
};

// Spectral sampling. squared_exponential: omega = z / lengthscale per
// dimension. matern52: omega = z * sqrt(5/u) / lengthscale with one chi^2_5
// draw u shared across the row (multivariate Student-t with 5 dof, whose
// spectral measure matches the Matern-5/2 kernel). The raw draws depend only
// on (seed, d, family); lengthscales are applied as a deterministic rescale.
FrequencyMatrix sample_frequencies(const RffConfig& config);

// points is n x 3 of (x_ft, y_ft, t_days). Returns n x 2d with all cosines
// first, then all sines, scaled by 1/sqrt(d), so each row has unit norm.
Eigen::MatrixXd featurize(const Eigen::MatrixXd& points, const FrequencyMatrix& freqs);

// Closed-form kernel value for the displacement (dx, dy, dt) after
// per-dimension lengthscale scaling; the Monte Carlo oracle target.
double kernel_closed_form(const RffConfig& config, double dx, double dy, double dt);

struct ApproximationRow {
  int d = 0;
  double mean_abs_err = 0.0;
  double max_abs_err = 0.0;
};

// Empirical |Phi_i . Phi_j - k(s_i, s_j)| on n_pairs random pairs for each
// requested d, averaged over n_seeds frequency draws. The pair set is fixed
// across d values and seeds.
std::vector<ApproximationRow> approximation_report(const RffConfig& base, int n_pairs,
                                                   std::span<const int> d_values, int n_seeds);

void write_frequencies_csv(const FrequencyMatrix& freqs, const std::string& path);

}  // namespace hotspot::rff
