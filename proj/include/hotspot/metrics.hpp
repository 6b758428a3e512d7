#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "hotspot/geometry.hpp"

namespace hotspot::metrics {

// Total forecast area window. The competition default is 0.25..0.75 square
// miles; synthetic desk-scale runs may substitute their own window, which is
// recorded as an override on the Selection.
struct AreaBudget {
  double min_sqft = 0.25 * geom::kSqftPerSqMile;
  double max_sqft = 0.75 * geom::kSqftPerSqMile;

  bool is_competition_default() const;
  void validate() const;
};

struct Selection {
  std::vector<std::int64_t> chosen;  // flat ids, ascending
  double total_area_sqft = 0.0;
  double coverage_param = 0.0;
  bool area_override = false;  // budget differed from the competition window
};

struct ScoreReport {
  std::int64_t n = 0;       // events captured by the selection
  std::int64_t n_star = 0;  // best achievable with the same cell count
  std::int64_t T = 0;       // all events in the window
  double hit_rate = 0.0;
  double pai = 0.0;
  double pei = 0.0;
  double area_sqft = 0.0;
  double region_area_sqft = 0.0;
  bool pei_vacuous = false;  // n* = 0, pei reported as 1 by convention
};

// Target area = min + coverage * (max - min); k = floor(target / cell_area),
// raised to ceil(min / cell_area) when flooring lands below the window.
// Chooses the k highest-intensity active cells, ties by ascending flat_id.
// intensities has one entry per grid cell; inactive cells are never chosen.
Selection select_hotspots(const Eigen::VectorXd& intensities, const geom::GridSpec& grid,
                          double coverage_param, const AreaBudget& budget = {},
                          const std::vector<bool>* active = nullptr);

// counts has one entry per grid cell (covering every active cell). n* is the
// top-|chosen| count sum over active cells.
ScoreReport score(const Selection& selection, std::span<const std::int64_t> counts,
                  const geom::GridSpec& grid, double region_area_sqft,
                  const std::vector<bool>* active = nullptr);

// Best achievable captured count for a k-cell selection. Exhaustive k-subset
// enumeration for up to 20 cells, cross-checked against the top-k sum; top-k
// alone for larger inputs.
std::int64_t oracle_score(int k, std::span<const std::int64_t> counts);

}  // namespace hotspot::metrics
