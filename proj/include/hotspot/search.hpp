#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hotspot/events.hpp"
#include "hotspot/geometry.hpp"
#include "hotspot/metrics.hpp"
#include "hotspot/rff_features.hpp"

namespace hotspot::search {

struct HyperParams {
  double cell_w_ft = 600.0;
  double cell_h_ft = 600.0;
  double coverage_param = 0.0;
  double spatial_lengthscale_ft = 500.0;
  double temporal_lengthscale_days = 30.0;
  double rotation_rad = 0.0;
  int n_frequencies = 20;  // d
  double l1_reg = 0.0;     // a
  double l2_reg = 0.0;     // b
  double kde_bandwidth_ft = 500.0;
  int kde_lags = 3;
  double kde_window_days = 15.0;
  rff::KernelFamily kernel_family = rff::KernelFamily::matern52;
  std::uint64_t seed = 0;

  bool operator==(const HyperParams&) const = default;
  int feature_count() const { return kde_lags + 2 * n_frequencies; }
};

// One fold per year: validation is the forecast-window-aligned period of that
// year, training is everything strictly before it.
struct CvFold {
  double validation_start_day = 0.0;  // also the training cutoff; window is (start, end]
  double validation_end_day = 0.0;
};

struct CvPlan {
  std::vector<CvFold> folds;
  double forecast_horizon_days = 0.0;
  double span_start_day = 0.0;
  double span_end_day = 0.0;
};

CvPlan build_cv_plan(double span_start_day, double span_end_day, double forecast_window_days,
                     double forecast_start_dayofyear, double year_length_days = 365.0);

struct EvalContext {
  geom::StudyRegion region;
  double region_area_sqft = 0.0;  // A in PAI; defaults to region.total_area_sqft when 0
  metrics::AreaBudget budget;
  bool allow_cell_area_out_of_bounds = false;
  // Cap on training periods per fold (0 = all history); desk-scale runs only.
  int max_training_periods = 0;
};

struct SearchResult {
  HyperParams hp;
  std::vector<double> fold_pei;
  double mean_pei = 0.0;
  bool infeasible = false;
  std::string infeasibility_reason;
  std::string provenance = "grid";  // or "bo"
  std::uint64_t candidate_order = 0;
};

// Full pipeline per fold: grid, aggregate, featurize, fit, predict, select,
// score PEI. Infeasible candidates come back flagged with mean PEI 0 instead
// of throwing. The block toggles serve the ablated variants (KDE-only
// baseline, no-RFF model).
SearchResult evaluate_candidate(const HyperParams& hp, std::span<const events::EventRecord> evs,
                                const CvPlan& plan, const EvalContext& ctx, bool use_kde = true,
                                bool use_rff = true);

// Flat search space: numeric field -> list of values (grid semantics) or the
// [min, max] envelope of that list (BO semantics). kernel_family may list
// families by name; seed participates as a plain numeric field.
struct SearchSpace {
  std::vector<std::pair<std::string, std::vector<double>>> numeric;
  std::vector<rff::KernelFamily> kernel_families;
};

const std::vector<std::string>& numeric_field_names();
void apply_numeric_field(HyperParams& hp, const std::string& name, double value);
double get_numeric_field(const HyperParams& hp, const std::string& name);

// Exhaustive Cartesian product, ranked by mean PEI descending with ties by
// fewer features then smaller penalty norm. parallelism > 1 evaluates
// candidates on worker threads; results are identical to the serial order.
std::vector<SearchResult> grid_search(const SearchSpace& space, const HyperParams& base,
                                      std::span<const events::EventRecord> evs, const CvPlan& plan,
                                      const EvalContext& ctx, int parallelism = 1);

// Sequential Bayesian optimization over the box hull of the space, one run per
// listed kernel family. Deterministic under bo_seed.
std::vector<SearchResult> bayes_opt_search(const SearchSpace& space, const HyperParams& base,
                                           std::span<const events::EventRecord> evs,
                                           const CvPlan& plan, const EvalContext& ctx, int n_init,
                                           int n_iter, std::uint64_t bo_seed);

// Concatenates populations and re-ranks; best-of-merged dominates each input.
std::vector<SearchResult> merge_ranked(std::span<const SearchResult> a,
                                       std::span<const SearchResult> b);

struct PeiDistributionReport {
  std::size_t n_results = 0;
  double fraction_zero_pei = 0.0;
  double max_pei = 0.0;
  double mean_pei = 0.0;
  double stddev_pei = 0.0;
  double z_score_of_max = 0.0;
  bool z_defined = false;  // false when the population has zero variance
};

PeiDistributionReport pei_distribution_report(std::span<const SearchResult> results);

}  // namespace hotspot::search
