#include "hotspot/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "hotspot/csv.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/events.hpp"
#include "hotspot/json_io.hpp"
#include "hotspot/kde_features.hpp"
#include "hotspot/pipeline.hpp"
#include "hotspot/poisson_glm.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/svg.hpp"
#include "hotspot/synth.hpp"

namespace hotspot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

struct LoadedRun {
  std::vector<events::EventRecord> evs;
  search::HyperParams hp;
  geom::StudyRegion region;
  search::EvalContext ctx;
  double span_start = 0.0;
  double span_end = 0.0;
  double t0 = 0.0;  // forecast start
};

geom::StudyRegion region_from_events(std::span<const events::EventRecord> evs) {
  if (evs.empty()) throw ValidationError("cannot derive a study region from zero events");
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const auto& ev : evs) {
    min_x = std::min(min_x, ev.x_ft);
    min_y = std::min(min_y, ev.y_ft);
    max_x = std::max(max_x, ev.x_ft);
    max_y = std::max(max_y, ev.y_ft);
  }
  if (!(max_x > min_x)) {
    min_x -= 500.0;
    max_x += 500.0;
  }
  if (!(max_y > min_y)) {
    min_y -= 500.0;
    max_y += 500.0;
  }
  return geom::StudyRegion::from_bbox(min_x, min_y, max_x, max_y);
}

LoadedRun load_run(const CommonOptions& opt, bool need_forecast_start) {
  LoadedRun run;
  std::vector<std::string> warnings;
  run.evs = events::load_events(opt.events_path, opt.category, parse_iso_date(opt.epoch),
                                &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (run.evs.empty()) throw ValidationError("no events loaded from " + opt.events_path);

  run.hp = opt.config_path.empty()
               ? search::HyperParams{}
               : io::hyperparams_from_json(io::read_json_file(opt.config_path));
  if (opt.master_seed) run.hp.seed = derive_seed(*opt.master_seed, "rff");

  run.region = opt.region ? *opt.region : region_from_events(run.evs);
  run.ctx.region = run.region;
  run.ctx.region_area_sqft = opt.region_area_sqmi > 0.0
                                 ? opt.region_area_sqmi * geom::kSqftPerSqMile
                                 : run.region.total_area_sqft;
  run.ctx.budget = metrics::AreaBudget{opt.budget_min_sqmi * geom::kSqftPerSqMile,
                                       opt.budget_max_sqmi * geom::kSqftPerSqMile};
  if (!run.ctx.budget.is_competition_default() && !opt.allow_out_of_bounds) {
    throw ValidationError(
        "custom forecast-area budget requires --allow-out-of-bounds");
  }
  run.ctx.allow_cell_area_out_of_bounds = opt.allow_out_of_bounds;
  run.ctx.max_training_periods = opt.max_training_periods;

  const auto [min_it, max_it] =
      std::minmax_element(run.evs.begin(), run.evs.end(),
                          [](const events::EventRecord& l, const events::EventRecord& r) {
                            return l.t_days < r.t_days;
                          });
  run.span_start = min_it->t_days;
  run.span_end = max_it->t_days;
  if (need_forecast_start) {
    run.t0 = opt.forecast_start_day >= 0.0 ? opt.forecast_start_day
                                           : run.span_end - opt.horizon_days;
  }
  return run;
}

struct FittedForecast {
  geom::GridSpec grid;
  std::vector<bool> active;
  pipeline::FeatureSetup setup;
  glm::ModelParams params;
  glm::FitReport report;
};

FittedForecast fit_at(const LoadedRun& run, double horizon_days, double t0) {
  FittedForecast out;
  out.setup.kde = kde::KdeConfig{run.hp.kde_bandwidth_ft, run.hp.kde_lags,
                                 run.hp.kde_window_days, false};
  out.setup.freqs = rff::sample_frequencies(
      rff::RffConfig{run.hp.n_frequencies, run.hp.spatial_lengthscale_ft,
                     run.hp.temporal_lengthscale_days, run.hp.kernel_family, run.hp.seed});
  out.grid = geom::build_grid(run.region, run.hp.cell_w_ft, run.hp.cell_h_ft,
                              run.hp.rotation_rad, run.ctx.allow_cell_area_out_of_bounds);
  out.active = geom::active_cells(out.grid, run.region);
  const glm::DesignMatrix train = pipeline::build_training_design(
      run.evs, out.grid, out.setup, t0, horizon_days, run.span_start, out.active,
      run.ctx.max_training_periods);
  auto [params, report] = glm::fit(train, run.hp.l1_reg, run.hp.l2_reg);
  out.params = std::move(params);
  out.report = std::move(report);
  return out;
}

struct WindowArtifacts {
  Eigen::VectorXd intensities;  // full grid
  metrics::Selection selection;
  std::vector<std::int64_t> truth_counts;
  bool truth_available = false;
  metrics::ScoreReport score;
};

WindowArtifacts score_window(const LoadedRun& run, const FittedForecast& fit, double t,
                             double horizon_days) {
  WindowArtifacts art;
  const glm::DesignMatrix fdesign = pipeline::build_forecast_design(
      run.evs, fit.grid, fit.setup, t, horizon_days, run.span_start, fit.active);
  art.intensities =
      pipeline::scatter_intensities(glm::predict(fit.params, fdesign), fdesign, fit.grid);
  art.selection = metrics::select_hotspots(art.intensities, fit.grid, run.hp.coverage_param,
                                           run.ctx.budget, &fit.active);
  art.truth_available = t + horizon_days <= run.span_end + 1e-9;
  if (art.truth_available) {
    art.truth_counts = pipeline::window_counts(run.evs, fit.grid, t, horizon_days);
    art.score = metrics::score(art.selection, art.truth_counts, fit.grid,
                               run.ctx.region_area_sqft, &fit.active);
  }
  return art;
}

std::string intensity_csv(const geom::GridSpec& grid, const Eigen::VectorXd& intensities,
                          const metrics::Selection& sel) {
  std::string out = "flat_id,col,row,centroid_x,centroid_y,intensity,selected\n";
  std::vector<bool> chosen(static_cast<size_t>(grid.n_cells()), false);
  for (const auto c : sel.chosen) chosen[static_cast<size_t>(c)] = true;
  char buf[256];
  for (std::int64_t c = 0; c < grid.n_cells(); ++c) {
    const geom::CellIndex idx = geom::cell_from_flat(grid, c);
    const geom::Point p = geom::cell_centroid(grid, idx);
    std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%.6f,%.6f,%.17g,%d\n",
                  static_cast<long long>(c), idx.col, idx.row, p.x, p.y, intensities(c),
                  chosen[static_cast<size_t>(c)] ? 1 : 0);
    out += buf;
  }
  return out;
}

json score_row_json(int window, double start, const metrics::ScoreReport& rep) {
  json j = io::score_report_to_json(rep);
  j["window"] = window;
  j["window_start_day"] = start;
  return j;
}

std::vector<events::EventRecord> window_events(std::span<const events::EventRecord> evs,
                                               double t, double horizon) {
  std::vector<events::EventRecord> out;
  for (const auto& ev : evs) {
    if (ev.t_days > t && ev.t_days <= t + horizon) out.push_back(ev);
  }
  return out;
}

}  // namespace

void cmd_forecast(const ForecastOptions& opt) {
  const LoadedRun run = load_run(opt.common, true);
  fs::create_directories(opt.common.out_dir);
  const FittedForecast fitted = fit_at(run, opt.common.horizon_days, run.t0);
  const WindowArtifacts art = score_window(run, fitted, run.t0, opt.common.horizon_days);

  const std::string dir = opt.common.out_dir + "/";
  io::write_json_file(dir + "grid.json", io::grid_to_json(fitted.grid));
  io::write_json_file(dir + "model.json",
                      io::model_to_json(fitted.params, fitted.report, run.hp.seed,
                                        io::config_hash(run.hp)));
  write_text(dir + "predictions.csv", intensity_csv(fitted.grid, art.intensities, art.selection));
  {
    std::string sel_csv = "flat_id,selected\n";
    std::vector<bool> chosen(static_cast<size_t>(fitted.grid.n_cells()), false);
    for (const auto c : art.selection.chosen) chosen[static_cast<size_t>(c)] = true;
    for (std::int64_t c = 0; c < fitted.grid.n_cells(); ++c) {
      sel_csv += std::to_string(c) + "," + (chosen[static_cast<size_t>(c)] ? "1" : "0") + "\n";
    }
    write_text(dir + "selection.csv", sel_csv);
  }
  {
    std::string wkt;
    for (const auto c : art.selection.chosen) {
      wkt += geom::polygon_wkt(geom::cell_polygon(fitted.grid, geom::cell_from_flat(fitted.grid, c)));
      wkt += "\n";
    }
    write_text(dir + "selection.wkt", wkt);
  }
  const std::vector<events::EventRecord> truth_evs =
      art.truth_available ? window_events(run.evs, run.t0, opt.common.horizon_days)
                          : std::vector<events::EventRecord>{};
  write_text(dir + "map.svg",
             io::render_hotspot_map(fitted.grid, art.selection.chosen,
                                    art.truth_available ? &art.truth_counts : nullptr,
                                    truth_evs, &fitted.active));
  if (art.truth_available) {
    io::write_json_file(dir + "score.json", io::score_report_to_json(art.score));
  }
  std::cout << "forecast written to " << opt.common.out_dir << " (start day " << run.t0
            << ", horizon " << opt.common.horizon_days << " d, " << art.selection.chosen.size()
            << " cells selected";
  if (art.truth_available) std::cout << ", PEI " << art.score.pei;
  std::cout << ")\n";
}

void cmd_rolling(const RollingOptions& opt) {
  if (opt.n_windows < 1) throw ValidationError("rolling needs at least one window");
  CommonOptions common = opt.common;
  LoadedRun run = load_run(common, false);
  run.t0 = common.forecast_start_day >= 0.0
               ? common.forecast_start_day
               : run.span_end - opt.n_windows * common.horizon_days;
  if (run.t0 + opt.n_windows * common.horizon_days > run.span_end + 1e-9) {
    throw ValidationError("insufficient horizon: " + std::to_string(opt.n_windows) +
                          " windows of " + std::to_string(common.horizon_days) +
                          " days exceed the data span");
  }
  fs::create_directories(common.out_dir);
  // One fit before the first window; later windows reuse the parameters while
  // the features roll forward.
  const FittedForecast fitted = fit_at(run, common.horizon_days, run.t0);

  json rows = json::array();
  std::string csv =
      "window,window_start_day,n,n_star,T,hit_rate,pai,pei,area_sqft,pei_vacuous\n";
  char buf[256];
  for (int w = 0; w < opt.n_windows; ++w) {
    const double t = run.t0 + w * common.horizon_days;
    const WindowArtifacts art = score_window(run, fitted, t, common.horizon_days);
    if (!art.truth_available) {
      throw ValidationError("window " + std::to_string(w) + " has no truth data");
    }
    rows.push_back(score_row_json(w, t, art.score));
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%lld,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%d\n", w, t,
                  static_cast<long long>(art.score.n), static_cast<long long>(art.score.n_star),
                  static_cast<long long>(art.score.T), art.score.hit_rate, art.score.pai,
                  art.score.pei, art.score.area_sqft, art.score.pei_vacuous ? 1 : 0);
    csv += buf;
  }
  const std::string dir = common.out_dir + "/";
  io::write_json_file(dir + "rolling.json", rows);
  write_text(dir + "rolling.csv", csv);
  io::write_json_file(dir + "grid.json", io::grid_to_json(fitted.grid));
  std::cout << "rolling evaluation of " << opt.n_windows << " windows written to "
            << common.out_dir << "\n";
}

void cmd_ablate(const AblateOptions& opt) {
  const LoadedRun run = load_run(opt.common, false);
  fs::create_directories(opt.common.out_dir);
  const search::CvPlan plan =
      search::build_cv_plan(run.span_start, run.span_end, opt.common.horizon_days,
                            opt.forecast_start_dayofyear, opt.year_length_days);

  struct Variant {
    std::string name;
    search::HyperParams hp;
    bool use_kde = true;
    bool use_rff = true;
  };
  std::vector<Variant> variants;
  variants.push_back({"full", run.hp, true, true});
  {
    search::HyperParams baseline = run.hp;
    baseline.kde_lags = 1;
    baseline.kde_bandwidth_ft = opt.baseline_bandwidth_ft;
    baseline.kde_window_days = opt.baseline_window_days;
    variants.push_back({"kde_baseline", baseline, true, false});
  }
  variants.push_back({"no_rff", run.hp, true, false});
  {
    search::HyperParams unrotated = run.hp;
    unrotated.rotation_rad = 0.0;
    variants.push_back({"no_rotation", unrotated, true, true});
  }
  {
    search::HyperParams fixed = run.hp;
    fixed.cell_w_ft = 600.0;
    fixed.cell_h_ft = 600.0;
    variants.push_back({"fixed_600_cells", fixed, true, true});
  }

  json out = json::array();
  std::string csv = "variant,mean_pei,fold_peis,infeasible\n";
  for (const auto& v : variants) {
    const search::SearchResult res =
        search::evaluate_candidate(v.hp, run.evs, plan, run.ctx, v.use_kde, v.use_rff);
    std::string folds;
    for (size_t i = 0; i < res.fold_pei.size(); ++i) {
      if (i) folds += ";";
      folds += io::format_double(res.fold_pei[i]);
    }
    csv += v.name + "," + io::format_double(res.mean_pei) + "," + folds + "," +
           (res.infeasible ? "1" : "0") + "\n";
    out.push_back(json{{"variant", v.name},
                       {"mean_pei", res.mean_pei},
                       {"fold_peis", res.fold_pei},
                       {"infeasible", res.infeasible},
                       {"reason", res.infeasibility_reason}});
  }
  const std::string dir = opt.common.out_dir + "/";
  write_text(dir + "ablate.csv", csv);
  io::write_json_file(dir + "ablate.json", out);
  std::cout << "ablation table written to " << opt.common.out_dir << "\n";
}

namespace {

std::string ledger_csv(std::span<const search::SearchResult> results) {
  std::string csv =
      "rank,provenance,mean_pei,infeasible,fold_peis,cell_w_ft,cell_h_ft,coverage_param,"
      "spatial_lengthscale_ft,temporal_lengthscale_days,rotation_rad,d,a,b,kde_bandwidth_ft,"
      "kde_lags,kde_window_days,kernel_family,seed,reason\n";
  int rank = 1;
  for (const auto& r : results) {
    std::string folds;
    for (size_t i = 0; i < r.fold_pei.size(); ++i) {
      if (i) folds += ";";
      folds += io::format_double(r.fold_pei[i]);
    }
    std::string reason = r.infeasibility_reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    csv += std::to_string(rank++) + "," + r.provenance + "," + io::format_double(r.mean_pei) +
           "," + (r.infeasible ? "1" : "0") + "," + folds + "," +
           io::format_double(r.hp.cell_w_ft) + "," + io::format_double(r.hp.cell_h_ft) + "," +
           io::format_double(r.hp.coverage_param) + "," +
           io::format_double(r.hp.spatial_lengthscale_ft) + "," +
           io::format_double(r.hp.temporal_lengthscale_days) + "," +
           io::format_double(r.hp.rotation_rad) + "," + std::to_string(r.hp.n_frequencies) +
           "," + io::format_double(r.hp.l1_reg) + "," + io::format_double(r.hp.l2_reg) + "," +
           io::format_double(r.hp.kde_bandwidth_ft) + "," + std::to_string(r.hp.kde_lags) +
           "," + io::format_double(r.hp.kde_window_days) + "," +
           rff::to_string(r.hp.kernel_family) + "," + std::to_string(r.hp.seed) + "," + reason +
           "\n";
  }
  return csv;
}

}  // namespace

void cmd_search(const SearchOptions& opt) {
  const LoadedRun run = load_run(opt.common, false);
  if (opt.space_path.empty()) throw ValidationError("search needs --space");
  const search::SearchSpace space =
      io::search_space_from_json(io::read_json_file(opt.space_path));
  const search::CvPlan plan =
      search::build_cv_plan(run.span_start, run.span_end, opt.common.horizon_days,
                            opt.forecast_start_dayofyear, opt.year_length_days);
  fs::create_directories(opt.common.out_dir);

  const std::uint64_t bo_seed =
      opt.common.master_seed ? derive_seed(*opt.common.master_seed, "bo")
                             : derive_seed(run.hp.seed, "bo");
  std::vector<search::SearchResult> results;
  if (opt.mode == "grid") {
    results = search::grid_search(space, run.hp, run.evs, plan, run.ctx, opt.parallelism);
  } else if (opt.mode == "bo") {
    results = search::bayes_opt_search(space, run.hp, run.evs, plan, run.ctx, opt.bo_init,
                                       opt.bo_iter, bo_seed);
  } else if (opt.mode == "merged") {
    const auto grid_results =
        search::grid_search(space, run.hp, run.evs, plan, run.ctx, opt.parallelism);
    const auto bo_results = search::bayes_opt_search(space, run.hp, run.evs, plan, run.ctx,
                                                     opt.bo_init, opt.bo_iter, bo_seed);
    results = search::merge_ranked(grid_results, bo_results);
  } else {
    throw ValidationError("unknown search mode '" + opt.mode + "' (grid|bo|merged)");
  }

  const std::string dir = opt.common.out_dir + "/";
  write_text(dir + "ledger.csv", ledger_csv(results));
  io::write_json_file(dir + "best_config.json", io::hyperparams_to_json(results.front().hp));
  if (results.size() >= 2) {
    const search::PeiDistributionReport rep = search::pei_distribution_report(results);
    io::write_json_file(dir + "pei_report.json",
                        json{{"n_results", rep.n_results},
                             {"fraction_zero_pei", rep.fraction_zero_pei},
                             {"max_pei", rep.max_pei},
                             {"mean_pei", rep.mean_pei},
                             {"stddev_pei", rep.stddev_pei},
                             {"z_score_of_max", rep.z_score_of_max},
                             {"z_defined", rep.z_defined}});
  }
  std::cout << "search (" << opt.mode << ") evaluated " << results.size()
            << " candidates; best mean PEI " << results.front().mean_pei << "\n";
}

void cmd_simulate(const SimulateOptions& opt) {
  if (opt.spec_path.empty()) throw ValidationError("simulate needs --spec");
  synth::SynthSpec spec = io::synth_spec_from_json(io::read_json_file(opt.spec_path));
  if (opt.master_seed) spec.seed = derive_seed(*opt.master_seed, "synth");
  fs::create_directories(opt.out_dir);
  const std::string dir = opt.out_dir + "/";

  std::vector<events::EventRecord> evs;
  if (opt.kind == "poisson") {
    evs = synth::simulate_poisson(spec).first;
  } else if (opt.kind == "hawkes") {
    evs = synth::simulate_hawkes(spec);
  } else {
    throw ValidationError("unknown simulation kind '" + opt.kind + "' (poisson|hawkes)");
  }
  events::write_events_csv(evs, dir + "events.csv", parse_iso_date(opt.epoch));
  json truth = io::synth_spec_to_json(spec);
  truth["kind"] = opt.kind;
  truth["n_events"] = evs.size();
  io::write_json_file(dir + "ground_truth.json", truth);
  std::cout << "simulated " << evs.size() << " " << opt.kind << " events into " << opt.out_dir
            << "\n";
}

void cmd_rff_check(const RffCheckOptions& opt) {
  search::HyperParams hp;
  if (!opt.config_path.empty()) {
    hp = io::hyperparams_from_json(io::read_json_file(opt.config_path));
  }
  if (opt.master_seed) hp.seed = derive_seed(*opt.master_seed, "rff");
  rff::RffConfig base{hp.n_frequencies, hp.spatial_lengthscale_ft,
                      hp.temporal_lengthscale_days, hp.kernel_family, hp.seed};
  const std::vector<rff::ApproximationRow> rows =
      rff::approximation_report(base, opt.n_pairs, opt.d_values, opt.n_seeds);
  fs::create_directories(opt.out_dir);
  std::string csv = "d,mean_abs_err,max_abs_err\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.d) + "," + io::format_double(r.mean_abs_err) + "," +
           io::format_double(r.max_abs_err) + "\n";
  }
  const std::string dir = opt.out_dir + "/";
  write_text(dir + "rff_check.csv", csv);
  write_text(dir + "rff_check.svg",
             io::render_error_curve(rows, "Kernel approximation error vs number of features (" +
                                              rff::to_string(base.kernel_family) + ")"));
  std::cout << "RFF approximation report written to " << opt.out_dir << "\n";
}

void cmd_score(const ScoreOptions& opt) {
  const geom::GridSpec grid = io::grid_from_json(io::read_json_file(opt.grid_path));
  const CsvTable sel_table = read_csv(opt.selection_path);
  if (sel_table.header.size() < 2 || sel_table.header[0] != "flat_id" ||
      sel_table.header[1] != "selected") {
    throw ValidationError("selection CSV must have header flat_id,selected");
  }
  metrics::Selection sel;
  for (const auto& row : sel_table.rows) {
    if (row.size() < 2) throw ValidationError("selection CSV row with fewer than 2 fields");
    if (row[1] == "1") sel.chosen.push_back(std::stoll(row[0]));
  }
  std::sort(sel.chosen.begin(), sel.chosen.end());
  sel.total_area_sqft = static_cast<double>(sel.chosen.size()) * grid.cell_area_sqft();
  sel.area_override = true;  // provenance unknown; recorded as non-contract

  std::vector<std::string> warnings;
  const std::vector<events::EventRecord> evs =
      events::load_events(opt.events_path, opt.category, parse_iso_date(opt.epoch), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const std::vector<std::int64_t> counts =
      pipeline::window_counts(evs, grid, opt.window_start_day, opt.window_days);
  const double region_area = opt.region_area_sqmi > 0.0
                                 ? opt.region_area_sqmi * geom::kSqftPerSqMile
                                 : static_cast<double>(grid.n_cells()) * grid.cell_area_sqft();
  const metrics::ScoreReport rep = metrics::score(sel, counts, grid, region_area);
  fs::create_directories(opt.out_dir);
  io::write_json_file(opt.out_dir + "/score.json", io::score_report_to_json(rep));
  std::cout << "score: n=" << rep.n << " n*=" << rep.n_star << " T=" << rep.T
            << " hit_rate=" << rep.hit_rate << " PAI=" << rep.pai << " PEI=" << rep.pei << "\n";
}

void cmd_convert_config(const ConvertOptions& opt) {
  const std::vector<io::TableRow> rows = io::load_table_csv(opt.table_path);
  if (rows.empty()) throw ValidationError("no rows in " + opt.table_path);
  fs::create_directories(opt.out_dir);
  for (const auto& row : rows) {
    // Self-check: the row must survive a format/parse round trip exactly.
    const std::string csv = io::table_row_to_csv(row);
    const io::TableRow reparsed = io::table_row_from_fields(split_csv_line(csv));
    if (!(reparsed == row)) {
      throw NumericalError("converter round trip failed for row " + csv);
    }
    std::string name = row.crime_type + "_" + row.horizon + ".json";
    std::replace(name.begin(), name.end(), ' ', '_');
    io::write_json_file(opt.out_dir + "/" + name, io::hyperparams_to_json(row.hp));
  }
  std::cout << "converted " << rows.size() << " rows into " << opt.out_dir << "\n";
}

}  // namespace hotspot::cli
