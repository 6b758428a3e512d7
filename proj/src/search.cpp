#include "hotspot/search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "hotspot/bayes_opt.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/pipeline.hpp"
#include "hotspot/poisson_glm.hpp"
#include "hotspot/rng.hpp"

namespace hotspot::search {

CvPlan build_cv_plan(double span_start_day, double span_end_day, double forecast_window_days,
                     double forecast_start_dayofyear, double year_length_days) {
  if (!(forecast_window_days > 0.0)) throw ValidationError("forecast window must be positive");
  if (forecast_window_days > year_length_days) {
    throw ValidationError("forecast window longer than a year");
  }
  if (!(forecast_start_dayofyear >= 0.0) || forecast_start_dayofyear >= year_length_days) {
    throw ValidationError("forecast start day-of-year must lie in [0, year length)");
  }
  if (!(span_end_day - span_start_day >= 2.0 * year_length_days)) {
    throw ValidationError("dataset span must cover at least two years");
  }
  CvPlan plan;
  plan.forecast_horizon_days = forecast_window_days;
  plan.span_start_day = span_start_day;
  plan.span_end_day = span_end_day;
  for (int year = 0;; ++year) {
    const double t = span_start_day + year * year_length_days + forecast_start_dayofyear;
    if (t + forecast_window_days > span_end_day + 1e-9) break;
    plan.folds.push_back(CvFold{t, t + forecast_window_days});
  }
  if (plan.folds.empty()) {
    throw ValidationError("no validation fold fits inside the dataset span");
  }
  return plan;
}

SearchResult evaluate_candidate(const HyperParams& hp, std::span<const events::EventRecord> evs,
                                const CvPlan& plan, const EvalContext& ctx, bool use_kde,
                                bool use_rff) {
  SearchResult result;
  result.hp = hp;
  const double region_area =
      ctx.region_area_sqft > 0.0 ? ctx.region_area_sqft : ctx.region.total_area_sqft;
  try {
    pipeline::FeatureSetup setup;
    setup.use_kde = use_kde;
    setup.use_rff = use_rff;
    setup.kde = kde::KdeConfig{hp.kde_bandwidth_ft, hp.kde_lags, hp.kde_window_days, false};
    rff::RffConfig rff_cfg{hp.n_frequencies, hp.spatial_lengthscale_ft,
                           hp.temporal_lengthscale_days, hp.kernel_family, hp.seed};
    // One frequency draw per candidate, shared across folds, so fold-to-fold
    // PEI variation reflects the data rather than sampling noise.
    setup.freqs = rff::sample_frequencies(rff_cfg);

    const geom::GridSpec grid = geom::build_grid(ctx.region, hp.cell_w_ft, hp.cell_h_ft,
                                                 hp.rotation_rad,
                                                 ctx.allow_cell_area_out_of_bounds);
    const std::vector<bool> active = geom::active_cells(grid, ctx.region);

    for (const CvFold& fold : plan.folds) {
      const glm::DesignMatrix train = pipeline::build_training_design(
          evs, grid, setup, fold.validation_start_day, plan.forecast_horizon_days,
          plan.span_start_day, active, ctx.max_training_periods);
      const auto [params, report] = glm::fit(train, hp.l1_reg, hp.l2_reg);
      const glm::DesignMatrix forecast = pipeline::build_forecast_design(
          evs, grid, setup, fold.validation_start_day, plan.forecast_horizon_days,
          plan.span_start_day, active);
      const Eigen::VectorXd intensities =
          pipeline::scatter_intensities(glm::predict(params, forecast), forecast, grid);
      const metrics::Selection sel =
          metrics::select_hotspots(intensities, grid, hp.coverage_param, ctx.budget, &active);
      const std::vector<std::int64_t> counts = pipeline::window_counts(
          evs, grid, fold.validation_start_day, plan.forecast_horizon_days);
      const metrics::ScoreReport rep = metrics::score(sel, counts, grid, region_area, &active);
      result.fold_pei.push_back(rep.pei);
    }
    result.mean_pei =
        std::accumulate(result.fold_pei.begin(), result.fold_pei.end(), 0.0) /
        static_cast<double>(result.fold_pei.size());
  } catch (const std::exception& e) {
    result.infeasible = true;
    result.infeasibility_reason = e.what();
    result.fold_pei.clear();
    result.mean_pei = 0.0;
  }
  return result;
}

const std::vector<std::string>& numeric_field_names() {
  static const std::vector<std::string> kNames = {
      "cell_w_ft",      "cell_h_ft",         "coverage_param", "spatial_lengthscale_ft",
      "temporal_lengthscale_days", "rotation_rad", "d",        "a",
      "b",              "kde_bandwidth_ft",  "kde_lags",       "kde_window_days",
      "seed"};
  return kNames;
}

void apply_numeric_field(HyperParams& hp, const std::string& name, double value) {
  if (name == "cell_w_ft") {
    hp.cell_w_ft = value;
  } else if (name == "cell_h_ft") {
    hp.cell_h_ft = value;
  } else if (name == "coverage_param") {
    hp.coverage_param = value;
  } else if (name == "spatial_lengthscale_ft") {
    hp.spatial_lengthscale_ft = value;
  } else if (name == "temporal_lengthscale_days") {
    hp.temporal_lengthscale_days = value;
  } else if (name == "rotation_rad") {
    hp.rotation_rad = value;
  } else if (name == "d") {
    hp.n_frequencies = static_cast<int>(std::lround(value));
  } else if (name == "a") {
    hp.l1_reg = value;
  } else if (name == "b") {
    hp.l2_reg = value;
  } else if (name == "kde_bandwidth_ft") {
    hp.kde_bandwidth_ft = value;
  } else if (name == "kde_lags") {
    hp.kde_lags = static_cast<int>(std::lround(value));
  } else if (name == "kde_window_days") {
    hp.kde_window_days = value;
  } else if (name == "seed") {
    hp.seed = static_cast<std::uint64_t>(std::llround(std::max(0.0, value)));
  } else {
    throw ValidationError("unknown hyperparameter field '" + name + "'");
  }
}

double get_numeric_field(const HyperParams& hp, const std::string& name) {
  if (name == "cell_w_ft") return hp.cell_w_ft;
  if (name == "cell_h_ft") return hp.cell_h_ft;
  if (name == "coverage_param") return hp.coverage_param;
  if (name == "spatial_lengthscale_ft") return hp.spatial_lengthscale_ft;
  if (name == "temporal_lengthscale_days") return hp.temporal_lengthscale_days;
  if (name == "rotation_rad") return hp.rotation_rad;
  if (name == "d") return static_cast<double>(hp.n_frequencies);
  if (name == "a") return hp.l1_reg;
  if (name == "b") return hp.l2_reg;
  if (name == "kde_bandwidth_ft") return hp.kde_bandwidth_ft;
  if (name == "kde_lags") return static_cast<double>(hp.kde_lags);
  if (name == "kde_window_days") return hp.kde_window_days;
  if (name == "seed") return static_cast<double>(hp.seed);
  throw ValidationError("unknown hyperparameter field '" + name + "'");
}

namespace {

void rank_results(std::vector<SearchResult>& results) {
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchResult& lhs, const SearchResult& rhs) {
                     if (lhs.mean_pei != rhs.mean_pei) return lhs.mean_pei > rhs.mean_pei;
                     if (lhs.hp.feature_count() != rhs.hp.feature_count()) {
                       return lhs.hp.feature_count() < rhs.hp.feature_count();
                     }
                     const double lp = std::hypot(lhs.hp.l1_reg, lhs.hp.l2_reg);
                     const double rp = std::hypot(rhs.hp.l1_reg, rhs.hp.l2_reg);
                     if (lp != rp) return lp < rp;
                     return lhs.candidate_order < rhs.candidate_order;
                   });
}

std::vector<HyperParams> expand_product(const SearchSpace& space, const HyperParams& base) {
  for (const auto& [name, values] : space.numeric) {
    if (values.empty()) throw ValidationError("empty value list for field '" + name + "'");
    get_numeric_field(base, name);  // validates the name
  }
  std::vector<rff::KernelFamily> families = space.kernel_families;
  if (families.empty()) families.push_back(base.kernel_family);

  std::vector<HyperParams> out;
  std::vector<size_t> idx(space.numeric.size(), 0);
  for (const auto& family : families) {
    std::fill(idx.begin(), idx.end(), 0);
    bool done = false;
    while (!done) {
      HyperParams hp = base;
      hp.kernel_family = family;
      for (size_t j = 0; j < space.numeric.size(); ++j) {
        apply_numeric_field(hp, space.numeric[j].first, space.numeric[j].second[idx[j]]);
      }
      out.push_back(hp);
      // Odometer increment, last field fastest.
      done = true;
      for (size_t j = space.numeric.size(); j-- > 0;) {
        if (++idx[j] < space.numeric[j].second.size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<SearchResult> grid_search(const SearchSpace& space, const HyperParams& base,
                                      std::span<const events::EventRecord> evs, const CvPlan& plan,
                                      const EvalContext& ctx, int parallelism) {
  const std::vector<HyperParams> candidates = expand_product(space, base);
  if (candidates.empty()) throw ValidationError("empty hyperparameter product");

  std::vector<SearchResult> results(candidates.size());
  const auto evaluate_range = [&](size_t begin, size_t stride) {
    for (size_t i = begin; i < candidates.size(); i += stride) {
      results[i] = evaluate_candidate(candidates[i], evs, plan, ctx);
      results[i].provenance = "grid";
      results[i].candidate_order = i;
    }
  };
  const int workers = std::max(1, parallelism);
  if (workers == 1) {
    evaluate_range(0, 1);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, evaluate_range,
                                   static_cast<size_t>(w), static_cast<size_t>(workers)));
    }
    for (auto& fut : futures) fut.get();
  }
  rank_results(results);
  return results;
}

std::vector<SearchResult> bayes_opt_search(const SearchSpace& space, const HyperParams& base,
                                           std::span<const events::EventRecord> evs,
                                           const CvPlan& plan, const EvalContext& ctx, int n_init,
                                           int n_iter, std::uint64_t bo_seed) {
  if (space.numeric.empty()) throw ValidationError("BO needs at least one numeric field");
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::string> names;
  for (const auto& [name, values] : space.numeric) {
    if (values.empty()) throw ValidationError("empty value list for field '" + name + "'");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*hi > *lo)) {
      throw ValidationError("degenerate BO bounds for field '" + name + "'");
    }
    bounds.emplace_back(*lo, *hi);
    names.push_back(name);
  }
  std::vector<rff::KernelFamily> families = space.kernel_families;
  if (families.empty()) families.push_back(base.kernel_family);

  std::vector<SearchResult> results;
  std::uint64_t order = 0;
  for (size_t fam = 0; fam < families.size(); ++fam) {
    const auto objective = [&](const Eigen::VectorXd& x) {
      HyperParams hp = base;
      hp.kernel_family = families[fam];
      for (size_t j = 0; j < names.size(); ++j) {
        apply_numeric_field(hp, names[j], x(static_cast<Eigen::Index>(j)));
      }
      SearchResult r = evaluate_candidate(hp, evs, plan, ctx);
      r.provenance = "bo";
      r.candidate_order = order++;
      results.push_back(r);
      return r.mean_pei;
    };
    bo::bo_maximize(objective, bounds, n_init, n_iter,
                    derive_seed(bo_seed, "bo-family-" + std::to_string(fam)));
  }
  rank_results(results);
  return results;
}

std::vector<SearchResult> merge_ranked(std::span<const SearchResult> a,
                                       std::span<const SearchResult> b) {
  std::vector<SearchResult> merged(a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  // Keep the merge stable across input orderings: re-number by provenance
  // then original order.
  for (size_t i = 0; i < merged.size(); ++i) merged[i].candidate_order = i;
  rank_results(merged);
  return merged;
}

PeiDistributionReport pei_distribution_report(std::span<const SearchResult> results) {
  if (results.size() < 2) {
    throw ValidationError("PEI distribution report needs at least two results");
  }
  PeiDistributionReport rep;
  rep.n_results = results.size();
  double sum = 0.0;
  for (const auto& r : results) {
    sum += r.mean_pei;
    rep.max_pei = std::max(rep.max_pei, r.mean_pei);
    if (r.mean_pei == 0.0) rep.fraction_zero_pei += 1.0;
  }
  rep.fraction_zero_pei /= static_cast<double>(results.size());
  rep.mean_pei = sum / static_cast<double>(results.size());
  double ss = 0.0;
  for (const auto& r : results) {
    ss += (r.mean_pei - rep.mean_pei) * (r.mean_pei - rep.mean_pei);
  }
  rep.stddev_pei = std::sqrt(ss / static_cast<double>(results.size() - 1));
  if (rep.stddev_pei > 0.0) {
    rep.z_score_of_max = (rep.max_pei - rep.mean_pei) / rep.stddev_pei;
    rep.z_defined = true;
  }
  return rep;
}

}  // namespace hotspot::search
