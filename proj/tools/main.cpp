#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "hotspot/commands.hpp"
#include "hotspot/errors.hpp"

namespace {

using hotspot::cli::CommonOptions;

struct SeedHolder {
  std::int64_t value = -1;
  void apply(std::optional<std::uint64_t>& target) const {
    if (value >= 0) target = static_cast<std::uint64_t>(value);
  }
};

void add_common(CLI::App* cmd, CommonOptions& common, SeedHolder& seed) {
  cmd->add_option("--events", common.events_path, "event CSV (category,date,x_ft,y_ft)")
      ->required();
  cmd->add_option("--config", common.config_path, "hyperparameter config JSON");
  cmd->add_option("--out", common.out_dir, "output directory");
  cmd->add_option("--epoch", common.epoch, "dataset epoch date YYYY-MM-DD");
  cmd->add_option("--category", common.category, "category filter (default: all)");
  cmd->add_option("--forecast-start-day", common.forecast_start_day,
                  "forecast window start, days since epoch (default: last horizon)");
  cmd->add_option("--horizon-days", common.horizon_days, "forecast window width in days");
  cmd->add_option("--seed", seed.value, "master seed (fans out to components)");
  cmd->add_flag("--allow-out-of-bounds", common.allow_out_of_bounds,
                "permit cell areas and forecast-area budgets outside the competition bounds");
  cmd->add_option("--max-train-periods", common.max_training_periods,
                  "cap training periods per fit (0 = all history)");
  cmd->add_option("--region-area-sqmi", common.region_area_sqmi,
                  "region area A for PAI, square miles (default: event bounding box)");
  cmd->add_option("--budget-min-sqmi", common.budget_min_sqmi, "forecast area minimum");
  cmd->add_option("--budget-max-sqmi", common.budget_max_sqmi, "forecast area maximum");
  cmd->add_option("--region", common.region_box, "study region min_x min_y max_x max_y (feet)")
      ->expected(4);
  cmd->callback([&common, &seed]() {
    if (common.region_box.size() == 4) {
      common.region = hotspot::geom::StudyRegion::from_bbox(
          common.region_box[0], common.region_box[1], common.region_box[2],
          common.region_box[3]);
    }
    seed.apply(common.master_seed);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hotspot: sparse spatiotemporal event forecasting on a rotated grid"};
  app.require_subcommand(1);

  hotspot::cli::ForecastOptions forecast;
  hotspot::cli::RollingOptions rolling;
  hotspot::cli::AblateOptions ablate;
  hotspot::cli::SearchOptions search_opt;
  hotspot::cli::SimulateOptions simulate;
  hotspot::cli::RffCheckOptions rff_check;
  hotspot::cli::ScoreOptions score_opt;
  hotspot::cli::ConvertOptions convert;
  SeedHolder fseed, rseed, aseed, sseed, simseed, rffseed;

  auto* cmd_forecast = app.add_subcommand("forecast", "train, predict one window, select cells");
  add_common(cmd_forecast, forecast.common, fseed);

  auto* cmd_rolling = app.add_subcommand("rolling", "fit once, score successive windows");
  add_common(cmd_rolling, rolling.common, rseed);
  cmd_rolling->add_option("--windows", rolling.n_windows, "number of rolling windows");

  auto* cmd_ablate = app.add_subcommand("ablate", "compare full model against ablated variants");
  add_common(cmd_ablate, ablate.common, aseed);
  cmd_ablate->add_option("--baseline-bandwidth-ft", ablate.baseline_bandwidth_ft,
                         "KDE baseline bandwidth");
  cmd_ablate->add_option("--baseline-window-days", ablate.baseline_window_days,
                         "KDE baseline window");
  cmd_ablate->add_option("--forecast-dayofyear", ablate.forecast_start_dayofyear,
                         "validation window start within each year");
  cmd_ablate->add_option("--year-length-days", ablate.year_length_days, "fold stride");

  auto* cmd_search = app.add_subcommand("search", "hyperparameter search (grid|bo|merged)");
  add_common(cmd_search, search_opt.common, sseed);
  cmd_search->add_option("--space", search_opt.space_path, "search space JSON")->required();
  cmd_search->add_option("--mode", search_opt.mode, "grid, bo, or merged");
  cmd_search->add_option("--parallelism", search_opt.parallelism, "worker threads for grid");
  cmd_search->add_option("--bo-init", search_opt.bo_init, "BO initial quasi-random evaluations");
  cmd_search->add_option("--bo-iter", search_opt.bo_iter, "BO acquisition rounds");
  cmd_search->add_option("--forecast-dayofyear", search_opt.forecast_start_dayofyear,
                         "validation window start within each year");
  cmd_search->add_option("--year-length-days", search_opt.year_length_days, "fold stride");

  auto* cmd_simulate = app.add_subcommand("simulate", "generate synthetic events");
  cmd_simulate->add_option("kind", simulate.kind, "poisson or hawkes")->required();
  cmd_simulate->add_option("--spec", simulate.spec_path, "synthetic spec JSON")->required();
  cmd_simulate->add_option("--out", simulate.out_dir, "output directory");
  cmd_simulate->add_option("--epoch", simulate.epoch, "epoch date for the event CSV");
  cmd_simulate->add_option("--seed", simseed.value, "master seed");
  cmd_simulate->callback([&]() { simseed.apply(simulate.master_seed); });

  auto* cmd_rff = app.add_subcommand("rff-check", "kernel approximation convergence report");
  cmd_rff->add_option("--config", rff_check.config_path, "hyperparameter config JSON");
  cmd_rff->add_option("--out", rff_check.out_dir, "output directory");
  cmd_rff->add_option("--d-values", rff_check.d_values, "feature counts to evaluate");
  cmd_rff->add_option("--pairs", rff_check.n_pairs, "random point pairs");
  cmd_rff->add_option("--seeds", rff_check.n_seeds, "frequency draws to average over");
  cmd_rff->add_option("--seed", rffseed.value, "master seed");
  cmd_rff->callback([&]() { rffseed.apply(rff_check.master_seed); });

  auto* cmd_score = app.add_subcommand("score", "score a saved selection against truth events");
  cmd_score->add_option("--grid", score_opt.grid_path, "grid JSON")->required();
  cmd_score->add_option("--selection", score_opt.selection_path, "selection CSV")->required();
  cmd_score->add_option("--events", score_opt.events_path, "truth event CSV")->required();
  cmd_score->add_option("--out", score_opt.out_dir, "output directory");
  cmd_score->add_option("--epoch", score_opt.epoch, "epoch date");
  cmd_score->add_option("--category", score_opt.category, "category filter");
  cmd_score->add_option("--window-start-day", score_opt.window_start_day, "window start day");
  cmd_score->add_option("--window-days", score_opt.window_days, "window width in days");
  cmd_score->add_option("--region-area-sqmi", score_opt.region_area_sqmi,
                        "region area A for PAI");

  auto* cmd_convert = app.add_subcommand("convert-config",
                                         "convert table-style hyperparameter CSV rows to JSON");
  cmd_convert->add_option("--table", convert.table_path, "table CSV")->required();
  cmd_convert->add_option("--out", convert.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_forecast->parsed()) hotspot::cli::cmd_forecast(forecast);
    if (cmd_rolling->parsed()) hotspot::cli::cmd_rolling(rolling);
    if (cmd_ablate->parsed()) hotspot::cli::cmd_ablate(ablate);
    if (cmd_search->parsed()) hotspot::cli::cmd_search(search_opt);
    if (cmd_simulate->parsed()) hotspot::cli::cmd_simulate(simulate);
    if (cmd_rff->parsed()) hotspot::cli::cmd_rff_check(rff_check);
    if (cmd_score->parsed()) hotspot::cli::cmd_score(score_opt);
    if (cmd_convert->parsed()) hotspot::cli::cmd_convert_config(convert);
  } catch (const hotspot::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hotspot::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
