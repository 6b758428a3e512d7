#pragma once

#include <span>
#include <vector>

#include "hotspot/events.hpp"
#include "hotspot/geometry.hpp"
#include "hotspot/kde_features.hpp"
#include "hotspot/poisson_glm.hpp"
#include "hotspot/rff_features.hpp"

namespace hotspot::pipeline {

// Feature plumbing shared by training, validation, and rolling windows.
// Either block can be switched off for the ablated variants.
struct FeatureSetup {
  kde::KdeConfig kde;
  rff::FrequencyMatrix freqs;
  bool use_kde = true;
  bool use_rff = true;
};

// Stacked supervised design for a forecast at time t with period width W:
// one row per (training period, active cell), periods (t - mW, t - (m-1)W]
// for m = 1..M ordered oldest first. KDE lags are evaluated at each period's
// start, RFF features at the cell's space-time centroid (period midpoint).
// M is the largest count whose KDE history fits after span_start_day, capped
// at max_periods when positive. Throws ValidationError when no period fits.
glm::DesignMatrix build_training_design(std::span<const events::EventRecord> evs,
                                        const geom::GridSpec& grid, const FeatureSetup& setup,
                                        double forecast_start_t, double window_days,
                                        double span_start_day,
                                        const std::vector<bool>& active, int max_periods = 0);

// One row per active cell describing the window (t, t+W]; counts are zeros
// (unknown at prediction time).
glm::DesignMatrix build_forecast_design(std::span<const events::EventRecord> evs,
                                        const geom::GridSpec& grid, const FeatureSetup& setup,
                                        double forecast_start_t, double window_days,
                                        double span_start_day, const std::vector<bool>& active);

// Realized per-cell counts (full grid length) for the window (t, t+W].
std::vector<std::int64_t> window_counts(std::span<const events::EventRecord> evs,
                                        const geom::GridSpec& grid, double window_start_t,
                                        double window_days);

// Scatters per-active-row predictions into a full-grid intensity vector
// (inactive cells get zero, which selection never picks).
Eigen::VectorXd scatter_intensities(const Eigen::VectorXd& predictions,
                                    const glm::DesignMatrix& design,
                                    const geom::GridSpec& grid);

}  // namespace hotspot::pipeline
