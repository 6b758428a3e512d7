#include "hotspot/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "hotspot/errors.hpp"

namespace hotspot::metrics {

bool AreaBudget::is_competition_default() const {
  return min_sqft == 0.25 * geom::kSqftPerSqMile && max_sqft == 0.75 * geom::kSqftPerSqMile;
}

void AreaBudget::validate() const {
  if (!(min_sqft > 0.0) || !(max_sqft >= min_sqft)) {
    throw ValidationError("area budget must satisfy 0 < min <= max");
  }
}

Selection select_hotspots(const Eigen::VectorXd& intensities, const geom::GridSpec& grid,
                          double coverage_param, const AreaBudget& budget,
                          const std::vector<bool>* active) {
  budget.validate();
  if (!(coverage_param >= 0.0 && coverage_param <= 1.0)) {
    throw ValidationError("coverage_param must lie in [0, 1]");
  }
  if (intensities.size() != grid.n_cells()) {
    throw ValidationError("intensity vector length does not match the grid");
  }
  if (active && static_cast<std::int64_t>(active->size()) != grid.n_cells()) {
    throw ValidationError("active mask length does not match the grid");
  }

  const double cell_area = grid.cell_area_sqft();
  const double target = budget.min_sqft + coverage_param * (budget.max_sqft - budget.min_sqft);
  std::int64_t k = static_cast<std::int64_t>(std::floor(target / cell_area + 1e-12));
  if (static_cast<double>(k) * cell_area < budget.min_sqft) {
    k = static_cast<std::int64_t>(std::ceil(budget.min_sqft / cell_area - 1e-12));
  }
  if (k < 1) k = 1;

  std::vector<std::int64_t> order;
  order.reserve(static_cast<size_t>(grid.n_cells()));
  for (std::int64_t c = 0; c < grid.n_cells(); ++c) {
    if (active && !(*active)[static_cast<size_t>(c)]) continue;
    order.push_back(c);
  }
  if (k > static_cast<std::int64_t>(order.size())) {
    throw ValidationError("selection needs " + std::to_string(k) + " cells but only " +
                          std::to_string(order.size()) + " are active");
  }
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t lhs, std::int64_t rhs) {
    if (intensities(lhs) != intensities(rhs)) return intensities(lhs) > intensities(rhs);
    return lhs < rhs;
  });

  Selection sel;
  sel.chosen.assign(order.begin(), order.begin() + k);
  std::sort(sel.chosen.begin(), sel.chosen.end());
  sel.total_area_sqft = static_cast<double>(k) * cell_area;
  sel.coverage_param = coverage_param;
  sel.area_override = !budget.is_competition_default();
  return sel;
}

ScoreReport score(const Selection& selection, std::span<const std::int64_t> counts,
                  const geom::GridSpec& grid, double region_area_sqft,
                  const std::vector<bool>* active) {
  if (static_cast<std::int64_t>(counts.size()) != grid.n_cells()) {
    throw ValidationError("count vector length does not match the grid");
  }
  if (active && static_cast<std::int64_t>(active->size()) != grid.n_cells()) {
    throw ValidationError("active mask length does not match the grid");
  }
  if (!(region_area_sqft > 0.0)) throw ValidationError("region area must be positive");

  ScoreReport rep;
  rep.area_sqft = selection.total_area_sqft;
  rep.region_area_sqft = region_area_sqft;

  std::vector<std::int64_t> eligible;
  eligible.reserve(counts.size());
  for (std::int64_t c = 0; c < grid.n_cells(); ++c) {
    if (active && !(*active)[static_cast<size_t>(c)]) continue;
    eligible.push_back(counts[static_cast<size_t>(c)]);
    rep.T += counts[static_cast<size_t>(c)];
  }
  for (const std::int64_t c : selection.chosen) {
    if (c < 0 || c >= grid.n_cells()) {
      throw ValidationError("selection references cell " + std::to_string(c) +
                            " outside the grid");
    }
    if (active && !(*active)[static_cast<size_t>(c)]) {
      throw ValidationError("selection references inactive cell " + std::to_string(c));
    }
    rep.n += counts[static_cast<size_t>(c)];
  }

  // Equal-area cells: the hypothetical maximum reduces to a top-k sum.
  const size_t k = selection.chosen.size();
  std::nth_element(eligible.begin(),
                   eligible.begin() + std::min(k, eligible.size()), eligible.end(),
                   std::greater<>());
  rep.n_star = std::accumulate(eligible.begin(),
                               eligible.begin() + std::min(k, eligible.size()),
                               std::int64_t{0});

  rep.hit_rate = rep.T > 0 ? static_cast<double>(rep.n) / static_cast<double>(rep.T) : 0.0;
  const double area_fraction = rep.area_sqft / rep.region_area_sqft;
  rep.pai = area_fraction > 0.0 ? rep.hit_rate / area_fraction : 0.0;
  if (rep.n_star > 0) {
    rep.pei = static_cast<double>(rep.n) / static_cast<double>(rep.n_star);
  } else {
    rep.pei = 1.0;  // any selection is vacuously optimal
    rep.pei_vacuous = true;
  }
  return rep;
}

std::int64_t oracle_score(int k, std::span<const std::int64_t> counts) {
  if (k < 0 || static_cast<size_t>(k) > counts.size()) {
    throw ValidationError("oracle_score: k outside 0..n");
  }
  std::vector<std::int64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::int64_t top_k =
      std::accumulate(sorted.begin(), sorted.begin() + k, std::int64_t{0});
  if (counts.size() <= 20) {
    // Exhaustive subset enumeration; must agree with the top-k route.
    std::int64_t best = 0;
    const std::uint32_t n = static_cast<std::uint32_t>(counts.size());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != k) continue;
      std::int64_t sum = 0;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) sum += counts[i];
      }
      best = std::max(best, sum);
    }
    if (best != top_k) {
      throw NumericalError("oracle_score enumeration disagrees with the top-k sum");
    }
  }
  return top_k;
}

}  // namespace hotspot::metrics
