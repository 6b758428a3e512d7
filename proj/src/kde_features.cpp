#include "hotspot/kde_features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "hotspot/errors.hpp"

namespace hotspot::kde {

namespace {

double gaussian(double dx, double dy, double inv_two_bw2, double cutoff_sq, bool use_cutoff) {
  const double d2 = dx * dx + dy * dy;
  if (use_cutoff && d2 > cutoff_sq) return 0.0;
  return std::exp(-d2 * inv_two_bw2);
}

}  // namespace

void KdeConfig::validate() const {
  if (!(bandwidth_ft > 0.0)) throw ValidationError("KDE bandwidth must be positive");
  if (n_lags <= 0) throw ValidationError("KDE lag count must be positive");
  if (!(window_days > 0.0)) throw ValidationError("KDE window must be positive");
}

double kde_lag(std::span<const events::EventRecord> evs, double query_x, double query_y,
               double query_t, int lag, const KdeConfig& config) {
  config.validate();
  if (lag < 1 || lag > config.n_lags) {
    throw ValidationError("lag " + std::to_string(lag) + " outside 1.." +
                          std::to_string(config.n_lags));
  }
  const double window_end = query_t - (lag - 1) * config.window_days;  // closed
  const double window_start = query_t - lag * config.window_days;      // open
  const double inv_two_bw2 = 1.0 / (2.0 * config.bandwidth_ft * config.bandwidth_ft);
  const double cutoff_sq = 36.0 * config.bandwidth_ft * config.bandwidth_ft;
  double sum = 0.0;
  for (const auto& ev : evs) {
    if (ev.t_days <= window_start || ev.t_days > window_end) continue;
    sum += gaussian(query_x - ev.x_ft, query_y - ev.y_ft, inv_two_bw2, cutoff_sq,
                    config.enable_cutoff);
  }
  return sum;
}

Eigen::MatrixXd kde_feature_block(std::span<const events::EventRecord> evs,
                                  const geom::GridSpec& grid, double forecast_start_t,
                                  const KdeConfig& config, double history_start_day) {
  config.validate();
  const double span = config.n_lags * config.window_days;
  if (forecast_start_t - span < history_start_day) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "insufficient KDE history: %d lags x %g days reach before day %g; earliest "
                  "usable forecast time is day %g",
                  config.n_lags, config.window_days, history_start_day,
                  history_start_day + span);
    throw ValidationError(buf);
  }

  // Bucket events by lag window once, then sweep cells.
  std::vector<std::vector<const events::EventRecord*>> by_lag(
      static_cast<size_t>(config.n_lags));
  for (const auto& ev : evs) {
    const double back = forecast_start_t - ev.t_days;
    if (back < 0.0) continue;
    const int lag0 = static_cast<int>(std::floor(back / config.window_days));
    if (lag0 >= config.n_lags) continue;
    by_lag[static_cast<size_t>(lag0)].push_back(&ev);
  }

  const double inv_two_bw2 = 1.0 / (2.0 * config.bandwidth_ft * config.bandwidth_ft);
  const double cutoff_sq = 36.0 * config.bandwidth_ft * config.bandwidth_ft;
  Eigen::MatrixXd block(grid.n_cells(), config.n_lags);
  for (std::int64_t flat = 0; flat < grid.n_cells(); ++flat) {
    const geom::Point c = geom::cell_centroid(grid, geom::cell_from_flat(grid, flat));
    for (int j = 0; j < config.n_lags; ++j) {
      double sum = 0.0;
      for (const auto* ev : by_lag[static_cast<size_t>(j)]) {
        sum += gaussian(c.x - ev->x_ft, c.y - ev->y_ft, inv_two_bw2, cutoff_sq,
                        config.enable_cutoff);
      }
      block(flat, j) = sum;
    }
  }
  return block;
}

bool hawkes_equivalence_check(std::span<const events::EventRecord> evs,
                              const geom::GridSpec& grid, double t, const KdeConfig& config) {
  config.validate();
  const double inv_two_bw2 = 1.0 / (2.0 * config.bandwidth_ft * config.bandwidth_ft);
  for (std::int64_t flat = 0; flat < grid.n_cells(); ++flat) {
    const geom::Point c = geom::cell_centroid(grid, geom::cell_from_flat(grid, flat));
    const double lhs = kde_lag(evs, c.x, c.y, t, 1, config);
    // Self-excitation with boxcar temporal kernel: every event passes through
    // the indicator product, no window bucketing.
    double rhs = 0.0;
    for (const auto& ev : evs) {
      const double boxcar =
          (ev.t_days > t - config.window_days && ev.t_days <= t) ? 1.0 : 0.0;
      const double dx = c.x - ev.x_ft;
      const double dy = c.y - ev.y_ft;
      rhs += boxcar * std::exp(-(dx * dx + dy * dy) * inv_two_bw2);
    }
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    if (std::abs(lhs - rhs) > 1e-12 * scale) return false;
  }
  return true;
}

void write_kde_block_csv(const Eigen::MatrixXd& block, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write KDE block CSV: " + path);
  out << "flat_id";
  for (Eigen::Index j = 0; j < block.cols(); ++j) out << ",lag_" << (j + 1);
  out << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", block(i, j));
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace hotspot::kde
