#pragma once

#include <Eigen/Core>
#include <span>

#include "hotspot/events.hpp"
#include "hotspot/geometry.hpp"

namespace hotspot::kde {

// Lagged spatial Gaussian KDE covariates; the model's parametric mean.
struct KdeConfig {
  double bandwidth_ft = 0.0;  // lengthscale of the unnormalized Gaussian kernel
  int n_lags = 0;
  double window_days = 0.0;
  // Optional 6-bandwidth truncation for very large inputs; each dropped term
  // is bounded by exp(-18).
  bool enable_cutoff = false;

  void validate() const;
};

// Unnormalized kernel sum over events with t_i in (t - lag*D, t - (lag-1)*D];
// kappa(0) = 1, constants are absorbed by the regression coefficients.
double kde_lag(std::span<const events::EventRecord> evs, double query_x, double query_y,
               double query_t, int lag, const KdeConfig& config);

// Row per cell, column per lag, evaluated at the cell centroid with the
// forecast time t. Only events strictly in past lag windows contribute.
// history_start_day is where usable event history begins; the full lag span
// must fit inside it.
Eigen::MatrixXd kde_feature_block(std::span<const events::EventRecord> evs,
                                  const geom::GridSpec& grid, double forecast_start_t,
                                  const KdeConfig& config, double history_start_day);

// True iff the lag-1 KDE equals the Hawkes self-excitation sum with a boxcar
// temporal kernel over the same window, at every cell centroid, to 1e-12
// relative error. The second route loops each event through the indicator
// product instead of bucketing by window.
bool hawkes_equivalence_check(std::span<const events::EventRecord> evs,
                              const geom::GridSpec& grid, double t, const KdeConfig& config);

// Inspection CSV: flat_id,lag_1..lag_p.
void write_kde_block_csv(const Eigen::MatrixXd& block, const std::string& path);

}  // namespace hotspot::kde
