#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hotspot/errors.hpp"
#include "hotspot/metrics.hpp"
#include "hotspot/rng.hpp"

using namespace hotspot;
using metrics::AreaBudget;
using metrics::ScoreReport;
using metrics::Selection;

namespace {

geom::GridSpec flat_grid(int n_cols, int n_rows, double cell = 250.0) {
  geom::GridSpec g;
  g.cell_w_ft = cell;
  g.cell_h_ft = cell;
  g.rotation_rad = 0.0;
  g.origin_x = 0.0;
  g.origin_y = 0.0;
  g.n_cols = n_cols;
  g.n_rows = n_rows;
  return g;
}

Eigen::VectorXd to_vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return v;
}

// Exhaustive best-k-subset search with the same tie rule as select_hotspots
// (first subset in ascending lexicographic order among the maximizers).
std::pair<std::vector<std::int64_t>, std::int64_t> enumerate_best(
    const std::vector<std::int64_t>& counts, int k) {
  const int n = static_cast<int>(counts.size());
  std::vector<std::int64_t> best_set;
  std::int64_t best_sum = -1;
  std::vector<int> pick(static_cast<size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::int64_t sum = 0;
    for (const int i : pick) sum += counts[static_cast<size_t>(i)];
    if (sum > best_sum) {
      best_sum = sum;
      best_set.assign(pick.begin(), pick.end());
    }
    // next combination
    int i = k - 1;
    while (i >= 0 && pick[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return {best_set, best_sum};
}

}  // namespace

TEST_CASE("select_hotspots honors the area window arithmetic") {
  // 250x250 cells (62,500 sqft), coverage 0: floor(6,969,600 / 62,500) = 111
  // cells fall short of the minimum, so the count is raised to 112.
  const auto grid = flat_grid(20, 20);
  Eigen::VectorXd intensities = Eigen::VectorXd::Zero(grid.n_cells());
  for (Eigen::Index i = 0; i < intensities.size(); ++i) {
    intensities(i) = static_cast<double>(i % 37);
  }
  const Selection sel = metrics::select_hotspots(intensities, grid, 0.0);
  CHECK(sel.chosen.size() == 112);
  CHECK(sel.total_area_sqft == doctest::Approx(112 * 62500.0));
  CHECK(sel.total_area_sqft >= 0.25 * geom::kSqftPerSqMile);
  CHECK(sel.total_area_sqft <= 0.75 * geom::kSqftPerSqMile);
  CHECK(!sel.area_override);

  // full coverage: floor(0.75 sq mi / cell) cells
  const Selection wide = metrics::select_hotspots(intensities, grid, 1.0);
  CHECK(wide.chosen.size() ==
        static_cast<size_t>(std::floor(0.75 * geom::kSqftPerSqMile / 62500.0)));
  CHECK(wide.total_area_sqft <= 0.75 * geom::kSqftPerSqMile);
}

TEST_CASE("select_hotspots picks top intensities with flat_id tie-breaks") {
  const auto grid = flat_grid(5, 1);
  AreaBudget budget{2 * grid.cell_area_sqft(), 2 * grid.cell_area_sqft()};
  const Selection sel =
      metrics::select_hotspots(to_vec({3, 1, 4, 1, 5}), grid, 0.0, budget);
  CHECK(sel.chosen == std::vector<std::int64_t>{2, 4});  // values 4 and 5
  CHECK(sel.area_override);

  AreaBudget three{3 * grid.cell_area_sqft(), 3 * grid.cell_area_sqft()};
  const Selection ties =
      metrics::select_hotspots(to_vec({7, 7, 7, 7, 7}), grid, 0.0, three);
  CHECK(ties.chosen == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("select_hotspots is invariant to positive rescaling") {
  const auto grid = flat_grid(4, 4);
  Rng rng(5);
  Eigen::VectorXd intensities(grid.n_cells());
  for (Eigen::Index i = 0; i < intensities.size(); ++i) intensities(i) = rng.uniform();
  AreaBudget budget{5 * grid.cell_area_sqft(), 5 * grid.cell_area_sqft()};
  const Selection a = metrics::select_hotspots(intensities, grid, 0.0, budget);
  const Selection b = metrics::select_hotspots(37.5 * intensities, grid, 0.0, budget);
  CHECK(a.chosen == b.chosen);
}

TEST_CASE("select_hotspots validates inputs") {
  const auto grid = flat_grid(3, 1);
  const Eigen::VectorXd v = to_vec({1, 2, 3});
  CHECK_THROWS_AS(metrics::select_hotspots(v, grid, -0.1), ValidationError);
  CHECK_THROWS_AS(metrics::select_hotspots(v, grid, 1.1), ValidationError);
  // competition minimum needs 112 cells of 62,500 sqft; only 3 exist
  CHECK_THROWS_AS(metrics::select_hotspots(v, grid, 0.0), ValidationError);
  // inactive cells cannot carry the selection
  AreaBudget budget{3 * grid.cell_area_sqft(), 3 * grid.cell_area_sqft()};
  std::vector<bool> active = {true, false, true};
  CHECK_THROWS_AS(metrics::select_hotspots(v, grid, 0.0, budget, &active), ValidationError);
}

TEST_CASE("score: perfect, empty, and hand-computed PAI cases") {
  const auto grid = flat_grid(5, 1);
  AreaBudget two{2 * grid.cell_area_sqft(), 2 * grid.cell_area_sqft()};

  SUBCASE("selecting the true top-k gives PEI 1") {
    const std::vector<std::int64_t> counts = {9, 1, 7, 2, 0};
    const Selection sel = metrics::select_hotspots(to_vec({9, 1, 7, 2, 0}), grid, 0.0, two);
    const ScoreReport rep = metrics::score(sel, counts, grid, 1e7);
    CHECK(rep.pei == 1.0);
    CHECK(rep.n == 16);
    CHECK(rep.n_star == 16);
    CHECK(!rep.pei_vacuous);
  }

  SUBCASE("missing everything gives zero hit rate, PAI, PEI") {
    const std::vector<std::int64_t> counts = {0, 5, 0, 5, 5};
    Selection sel;
    sel.chosen = {0, 2};
    sel.total_area_sqft = 2 * grid.cell_area_sqft();
    const ScoreReport rep = metrics::score(sel, counts, grid, 1e7);
    CHECK(rep.n == 0);
    CHECK(rep.T == 15);
    CHECK(rep.hit_rate == 0.0);
    CHECK(rep.pai == 0.0);
    CHECK(rep.pei == 0.0);
  }

  SUBCASE("PAI follows the hand arithmetic: (5/100) / (0.5/147.71)") {
    Selection sel;
    sel.chosen = {0};
    sel.total_area_sqft = 0.5 * geom::kSqftPerSqMile;
    std::vector<std::int64_t> counts = {5, 95, 0, 0, 0};
    const ScoreReport rep =
        metrics::score(sel, counts, grid, 147.71 * geom::kSqftPerSqMile);
    CHECK(std::abs(rep.pai - 14.771) <= 1e-9);
    CHECK(rep.hit_rate == doctest::Approx(0.05).epsilon(1e-12));
  }

  SUBCASE("no events anywhere: PEI 1 by convention, flagged") {
    const std::vector<std::int64_t> counts = {0, 0, 0, 0, 0};
    Selection sel;
    sel.chosen = {1};
    sel.total_area_sqft = grid.cell_area_sqft();
    const ScoreReport rep = metrics::score(sel, counts, grid, 1e7);
    CHECK(rep.pei == 1.0);
    CHECK(rep.pei_vacuous);
    CHECK(rep.hit_rate == 0.0);
  }
}

TEST_CASE("oracle_score: enumeration equals the top-k sum") {
  CHECK(metrics::oracle_score(2, std::vector<std::int64_t>{3, 1, 4}) == 7);
  CHECK(metrics::oracle_score(1, std::vector<std::int64_t>{0, 0, 0}) == 0);
  CHECK(metrics::oracle_score(0, std::vector<std::int64_t>{5, 5}) == 0);
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::int64_t> counts(15);
    for (auto& c : counts) c = rng.poisson(2.0);
    const int k = 1 + static_cast<int>(rng.uniform() * 10);
    CHECK_NOTHROW(metrics::oracle_score(k, counts));  // internally cross-checked
  }
  CHECK_THROWS_AS(metrics::oracle_score(4, std::vector<std::int64_t>{1, 2}), ValidationError);
}

TEST_CASE("selection and score agree with exhaustive subset enumeration") {
  // 100 random instances with at most 20 cells.
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_cells = 5 + static_cast<int>(rng.uniform() * 16.0);  // 5..20
    const auto grid = flat_grid(n_cells, 1);
    const int k = 1 + static_cast<int>(rng.uniform() * (n_cells - 1));
    std::vector<std::int64_t> counts(static_cast<size_t>(n_cells));
    for (auto& c : counts) c = rng.poisson(3.0);

    // Selection by the true counts must match the enumeration argmax exactly.
    Eigen::VectorXd intensities(n_cells);
    for (int i = 0; i < n_cells; ++i) {
      intensities(i) = static_cast<double>(counts[static_cast<size_t>(i)]);
    }
    AreaBudget budget{k * grid.cell_area_sqft(), k * grid.cell_area_sqft()};
    const Selection sel = metrics::select_hotspots(intensities, grid, 0.0, budget);
    const auto [best_set, best_sum] = enumerate_best(counts, k);
    CHECK(sel.chosen == best_set);

    const ScoreReport rep = metrics::score(sel, counts, grid, 1e8);
    CHECK(rep.n == best_sum);
    CHECK(rep.n_star == best_sum);
    CHECK(rep.n_star == metrics::oracle_score(k, counts));
    if (best_sum > 0) CHECK(rep.pei == 1.0);
  }
}

TEST_CASE("replacing a chosen cell with a strictly hotter one never lowers PEI") {
  const auto grid = flat_grid(6, 1);
  const std::vector<std::int64_t> counts = {1, 9, 2, 8, 0, 3};
  Selection sel;
  sel.chosen = {0, 4};  // cold cells
  sel.total_area_sqft = 2 * grid.cell_area_sqft();
  double prev = metrics::score(sel, counts, grid, 1e7).pei;
  // swap in strictly hotter cells one at a time
  sel.chosen = {1, 4};
  const double step1 = metrics::score(sel, counts, grid, 1e7).pei;
  CHECK(step1 >= prev);
  sel.chosen = {1, 3};
  const double step2 = metrics::score(sel, counts, grid, 1e7).pei;
  CHECK(step2 >= step1);
  CHECK(step2 == 1.0);
}

TEST_CASE("the true top-k selection maximizes PAI over same-size selections") {
  const auto grid = flat_grid(10, 1);
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::int64_t> counts(10);
    for (auto& c : counts) c = rng.poisson(4.0);
    Eigen::VectorXd intensities(10);
    for (int i = 0; i < 10; ++i) intensities(i) = static_cast<double>(counts[static_cast<size_t>(i)]);
    const int k = 3;
    AreaBudget budget{k * grid.cell_area_sqft(), k * grid.cell_area_sqft()};
    const Selection best = metrics::select_hotspots(intensities, grid, 0.0, budget);
    const double best_pai = metrics::score(best, counts, grid, 1e8).pai;
    for (int alt = 0; alt < 30; ++alt) {
      Selection sel;
      while (sel.chosen.size() < static_cast<size_t>(k)) {
        const std::int64_t c = static_cast<std::int64_t>(rng.uniform() * 10.0);
        if (std::find(sel.chosen.begin(), sel.chosen.end(), c) == sel.chosen.end()) {
          sel.chosen.push_back(c);
        }
      }
      std::sort(sel.chosen.begin(), sel.chosen.end());
      sel.total_area_sqft = k * grid.cell_area_sqft();
      CHECK(best_pai >= metrics::score(sel, counts, grid, 1e8).pai);
    }
  }
}

TEST_CASE("score rejects misaligned inputs") {
  const auto grid = flat_grid(4, 1);
  Selection sel;
  sel.chosen = {9};
  sel.total_area_sqft = grid.cell_area_sqft();
  const std::vector<std::int64_t> counts = {1, 2, 3, 4};
  CHECK_THROWS_AS(metrics::score(sel, counts, grid, 1e7), ValidationError);
  const std::vector<std::int64_t> short_counts = {1, 2};
  Selection ok;
  ok.chosen = {0};
  CHECK_THROWS_AS(metrics::score(ok, short_counts, grid, 1e7), ValidationError);
}
