#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hotspot/geometry.hpp"
#include "hotspot/metrics.hpp"
#include "hotspot/search.hpp"

namespace hotspot::cli {

// Options shared by the pipeline-driving subcommands. Paths are read at
// launch; every output lands under out_dir. A negative forecast_start_day
// means "last horizon of the data" so the final window is scoreable.
struct CommonOptions {
  std::string events_path;
  std::string config_path;
  std::string out_dir = ".";
  std::string epoch = "2012-01-01";
  std::string category;  // empty keeps all categories
  double forecast_start_day = -1.0;
  double horizon_days = 7.0;
  std::optional<std::uint64_t> master_seed;  // fans out to component seeds
  bool allow_out_of_bounds = false;          // cell area + forecast area windows
  int max_training_periods = 0;              // 0 = use all history
  std::optional<geom::StudyRegion> region;   // default: bbox of the events
  std::vector<double> region_box;            // CLI staging: min_x min_y max_x max_y
  double region_area_sqmi = 0.0;             // PAI denominator A; 0 = region area
  double budget_min_sqmi = 0.25;
  double budget_max_sqmi = 0.75;
};

struct ForecastOptions {
  CommonOptions common;
};

struct RollingOptions {
  CommonOptions common;
  int n_windows = 13;
};

struct AblateOptions {
  CommonOptions common;
  double baseline_bandwidth_ft = 656.0;  // ~200 m, a configurable convention
  double baseline_window_days = 61.0;    // ~2 months
  double forecast_start_dayofyear = 60.0;
  double year_length_days = 365.0;
};

struct SearchOptions {
  CommonOptions common;
  std::string space_path;
  std::string mode = "grid";  // grid | bo | merged
  int parallelism = 1;
  int bo_init = 8;
  int bo_iter = 12;
  double forecast_start_dayofyear = 60.0;
  double year_length_days = 365.0;
};

struct SimulateOptions {
  std::string kind = "poisson";  // poisson | hawkes
  std::string spec_path;
  std::string out_dir = ".";
  std::string epoch = "2012-01-01";
  std::optional<std::uint64_t> master_seed;
};

struct RffCheckOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<int> d_values = {5, 50, 500, 1000};
  int n_pairs = 200;
  int n_seeds = 10;
  std::optional<std::uint64_t> master_seed;
};

struct ScoreOptions {
  std::string grid_path;
  std::string selection_path;
  std::string events_path;
  std::string out_dir = ".";
  std::string epoch = "2012-01-01";
  std::string category;
  double window_start_day = 0.0;
  double window_days = 7.0;
  double region_area_sqmi = 0.0;  // 0 = grid coverage area
};

struct ConvertOptions {
  std::string table_path;
  std::string out_dir = ".";
};

void cmd_forecast(const ForecastOptions& opt);
void cmd_rolling(const RollingOptions& opt);
void cmd_ablate(const AblateOptions& opt);
void cmd_search(const SearchOptions& opt);
void cmd_simulate(const SimulateOptions& opt);
void cmd_rff_check(const RffCheckOptions& opt);
void cmd_score(const ScoreOptions& opt);
void cmd_convert_config(const ConvertOptions& opt);

}  // namespace hotspot::cli
