#include "hotspot/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hotspot/errors.hpp"

namespace hotspot::pipeline {

namespace {

std::vector<std::int64_t> active_ids(const std::vector<bool>& active) {
  std::vector<std::int64_t> ids;
  for (size_t c = 0; c < active.size(); ++c) {
    if (active[c]) ids.push_back(static_cast<std::int64_t>(c));
  }
  return ids;
}

// Feature rows for one period starting at t (KDE cutoff) with RFF time at the
// period midpoint.
void fill_period_rows(std::span<const events::EventRecord> evs, const geom::GridSpec& grid,
                      const FeatureSetup& setup, double period_start, double window_days,
                      double history_start, const std::vector<std::int64_t>& ids,
                      glm::DesignMatrix& out, Eigen::Index row0) {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  if (setup.use_kde) {
    const Eigen::MatrixXd block =
        kde::kde_feature_block(evs, grid, period_start, setup.kde, history_start);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.kde.row(row0 + i) = block.row(ids[static_cast<size_t>(i)]);
    }
  }
  if (setup.use_rff) {
    Eigen::MatrixXd points(n, 3);
    const double t_mid = period_start + 0.5 * window_days;
    for (Eigen::Index i = 0; i < n; ++i) {
      const geom::Point c = geom::cell_centroid(
          grid, geom::cell_from_flat(grid, ids[static_cast<size_t>(i)]));
      points(i, 0) = c.x;
      points(i, 1) = c.y;
      points(i, 2) = t_mid;
    }
    out.rff.middleRows(row0, n) = rff::featurize(points, setup.freqs);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out.meta[static_cast<size_t>(row0 + i)] = {period_start, ids[static_cast<size_t>(i)]};
  }
}

}  // namespace

glm::DesignMatrix build_training_design(std::span<const events::EventRecord> evs,
                                        const geom::GridSpec& grid, const FeatureSetup& setup,
                                        double forecast_start_t, double window_days,
                                        double span_start_day, const std::vector<bool>& active,
                                        int max_periods) {
  if (!(window_days > 0.0)) throw ValidationError("window width must be positive");
  if (!setup.use_kde && !setup.use_rff) {
    throw ValidationError("at least one feature block must be enabled");
  }
  const double lag_span =
      setup.use_kde ? setup.kde.n_lags * setup.kde.window_days : 0.0;
  const int fit =
      static_cast<int>(std::floor((forecast_start_t - span_start_day - lag_span) / window_days +
                                  1e-9));
  int n_periods = fit;
  if (max_periods > 0) n_periods = std::min(n_periods, max_periods);
  if (n_periods < 1) {
    throw ValidationError(
        "insufficient history for any training period before the forecast time");
  }

  const std::vector<std::int64_t> ids = active_ids(active);
  if (ids.empty()) throw ValidationError("no active cells in the grid");
  const Eigen::Index n_rows = static_cast<Eigen::Index>(ids.size()) * n_periods;

  glm::DesignMatrix design;
  design.kde.resize(setup.use_kde ? n_rows : 0, setup.use_kde ? setup.kde.n_lags : 0);
  design.rff.resize(setup.use_rff ? n_rows : 0,
                    setup.use_rff ? 2 * setup.freqs.config.n_frequencies : 0);
  design.counts.resize(n_rows);
  design.meta.resize(static_cast<size_t>(n_rows));

  events::TemporalWindowing windowing{window_days, forecast_start_t, n_periods};
  const events::AggregatedCube cube = events::aggregate(evs, grid, windowing);

  Eigen::Index row0 = 0;
  for (int m = n_periods; m >= 1; --m) {  // oldest period first
    const double period_start = forecast_start_t - m * window_days;
    fill_period_rows(evs, grid, setup, period_start, window_days, span_start_day, ids, design,
                     row0);
    const int backward_index = m - 1;
    for (size_t i = 0; i < ids.size(); ++i) {
      design.counts(row0 + static_cast<Eigen::Index>(i)) =
          static_cast<double>(cube.at(backward_index, ids[i]));
    }
    row0 += static_cast<Eigen::Index>(ids.size());
  }
  return design;
}

glm::DesignMatrix build_forecast_design(std::span<const events::EventRecord> evs,
                                        const geom::GridSpec& grid, const FeatureSetup& setup,
                                        double forecast_start_t, double window_days,
                                        double span_start_day, const std::vector<bool>& active) {
  if (!setup.use_kde && !setup.use_rff) {
    throw ValidationError("at least one feature block must be enabled");
  }
  const std::vector<std::int64_t> ids = active_ids(active);
  if (ids.empty()) throw ValidationError("no active cells in the grid");
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());

  glm::DesignMatrix design;
  design.kde.resize(setup.use_kde ? n : 0, setup.use_kde ? setup.kde.n_lags : 0);
  design.rff.resize(setup.use_rff ? n : 0,
                    setup.use_rff ? 2 * setup.freqs.config.n_frequencies : 0);
  design.counts = Eigen::VectorXd::Zero(n);
  design.meta.resize(static_cast<size_t>(n));
  fill_period_rows(evs, grid, setup, forecast_start_t, window_days, span_start_day, ids, design,
                   0);
  return design;
}

std::vector<std::int64_t> window_counts(std::span<const events::EventRecord> evs,
                                        const geom::GridSpec& grid, double window_start_t,
                                        double window_days) {
  events::TemporalWindowing windowing{window_days, window_start_t + window_days, 1};
  const events::AggregatedCube cube = events::aggregate(evs, grid, windowing);
  std::vector<std::int64_t> counts(static_cast<size_t>(grid.n_cells()));
  for (std::int64_t c = 0; c < grid.n_cells(); ++c) {
    counts[static_cast<size_t>(c)] = cube.at(0, c);
  }
  return counts;
}

Eigen::VectorXd scatter_intensities(const Eigen::VectorXd& predictions,
                                    const glm::DesignMatrix& design,
                                    const geom::GridSpec& grid) {
  if (predictions.size() != static_cast<Eigen::Index>(design.meta.size())) {
    throw ValidationError("prediction vector does not match design rows");
  }
  Eigen::VectorXd intensities = Eigen::VectorXd::Zero(grid.n_cells());
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    intensities(design.meta[static_cast<size_t>(i)].flat_id) = predictions(i);
  }
  return intensities;
}

}  // namespace hotspot::pipeline
