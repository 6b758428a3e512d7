#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "hotspot/csv.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/json_io.hpp"
#include "hotspot/rng.hpp"
#include "test_util.hpp"

using namespace hotspot;
using nlohmann::json;
using search::HyperParams;

TEST_CASE("format_double emits the shortest round-trip representation") {
  CHECK(io::format_double(10.0) == "10");
  CHECK(io::format_double(67.1) == "67.1");
  CHECK(io::format_double(5e-05) == "5e-05");
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-8.0, 8.0));
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("grid JSON round trip") {
  const geom::GridSpec grid =
      geom::build_grid(geom::StudyRegion::from_bbox(0, 0, 1000, 1000), 250, 250, 0.3);
  const geom::GridSpec back = io::grid_from_json(io::grid_to_json(grid));
  CHECK(back.cell_w_ft == grid.cell_w_ft);
  CHECK(back.cell_h_ft == grid.cell_h_ft);
  CHECK(back.rotation_rad == grid.rotation_rad);
  CHECK(back.origin_x == grid.origin_x);
  CHECK(back.origin_y == grid.origin_y);
  CHECK(back.n_cols == grid.n_cols);
  CHECK(back.n_rows == grid.n_rows);
  CHECK_THROWS_AS(io::grid_from_json(json{{"cell_w_ft", 250.0}}), ValidationError);
}

TEST_CASE("hyperparams JSON uses exactly the contract field names, bitwise round trip") {
  HyperParams hp;
  hp.cell_w_ft = 478.0;
  hp.cell_h_ft = 710.0;
  hp.coverage_param = 0.1;
  hp.spatial_lengthscale_ft = 570.0;
  hp.temporal_lengthscale_days = 67.1;
  hp.rotation_rad = 0.85;
  hp.n_frequencies = 362;
  hp.l1_reg = 0.0;
  hp.l2_reg = 5e-5;
  hp.kde_bandwidth_ft = 274.7;
  hp.kde_lags = 9;
  hp.kde_window_days = 39.62;
  hp.kernel_family = rff::KernelFamily::matern52;
  hp.seed = 991;

  const json j = io::hyperparams_to_json(hp);
  const std::set<std::string> expected = {
      "cell_w_ft", "cell_h_ft", "coverage_param", "spatial_lengthscale_ft",
      "temporal_lengthscale_days", "rotation_rad", "d", "a", "b", "kde_bandwidth_ft",
      "kde_lags", "kde_window_days", "kernel_family", "seed"};
  std::set<std::string> got;
  for (const auto& [key, value] : j.items()) got.insert(key);
  CHECK(got == expected);

  const HyperParams back = io::hyperparams_from_json(j);
  CHECK(back == hp);
  // through a serialized string as well
  const HyperParams back2 = io::hyperparams_from_json(json::parse(j.dump()));
  CHECK(back2 == hp);
}

TEST_CASE("config hash is stable and input-sensitive") {
  HyperParams hp;
  const std::string h1 = io::config_hash(hp);
  const std::string h2 = io::config_hash(hp);
  CHECK(h1 == h2);
  CHECK(h1.size() == 16);
  hp.kde_bandwidth_ft += 1.0;
  CHECK(io::config_hash(hp) != h1);
}

TEST_CASE("model JSON carries coefficients and the fit report") {
  glm::ModelParams params;
  params.gamma = Eigen::Vector2d(0.5, -0.25);
  params.beta = Eigen::Vector3d(1.0, 2.0, -3.0);
  params.l1_weight = 0.1;
  params.l2_weight = 0.2;
  glm::FitReport report;
  report.objective_value = -12.5;
  report.epochs = 37;
  report.converged = true;
  report.grad_max_norm = 3e-7;
  const json j = io::model_to_json(params, report, 55, "deadbeefdeadbeef");
  CHECK(j.at("a") == 0.1);
  CHECK(j.at("b") == 0.2);
  CHECK(j.at("seed") == 55);
  CHECK(j.at("fit_report").at("converged") == true);
  const glm::ModelParams back = io::model_params_from_json(j);
  CHECK(back.gamma == params.gamma);
  CHECK(back.beta == params.beta);
  CHECK(back.l1_weight == params.l1_weight);
}

TEST_CASE("synth spec JSON round trip and validation") {
  synth::SynthSpec spec;
  spec.region = geom::StudyRegion::from_bbox(0, 0, 5000, 4000);
  spec.horizon_days = 200.0;
  spec.uniform_rate = 1e-9;
  spec.bumps.push_back({5e-8, 1000.0, 1500.0, 300.0});
  spec.hawkes_branching = 0.4;
  spec.seed = 17;
  const synth::SynthSpec back = io::synth_spec_from_json(io::synth_spec_to_json(spec));
  CHECK(back.region.max_x == 5000.0);
  CHECK(back.bumps.size() == 1);
  CHECK(back.bumps[0].scale_ft == 300.0);
  CHECK(back.hawkes_branching == 0.4);
  CHECK(back.seed == 17);

  json bad = io::synth_spec_to_json(spec);
  bad["hawkes_branching"] = 1.5;
  CHECK_THROWS_AS(io::synth_spec_from_json(bad), ValidationError);
}

TEST_CASE("search space JSON: lists, kernel families, and rejects") {
  const json j = {{"kde_bandwidth_ft", {250.0, 500.0}},
                  {"d", {5, 20}},
                  {"kernel_family", {"matern52", "squared_exponential"}}};
  const search::SearchSpace space = io::search_space_from_json(j);
  CHECK(space.numeric.size() == 2);
  CHECK(space.kernel_families.size() == 2);

  CHECK_THROWS_AS(io::search_space_from_json(json{{"d", json::array()}}), ValidationError);
  CHECK_THROWS_AS(io::search_space_from_json(json{{"d", {"x"}}}), ValidationError);
  CHECK_THROWS_AS(io::search_space_from_json(json::object()), ValidationError);
  CHECK_THROWS_AS(io::search_space_from_json(json{{"kernel_family", {"gauss"}}}),
                  ValidationError);
}

TEST_CASE("table row parsing: the burglary one-week submission") {
  const std::vector<std::string> fields = {"250", "250",    "95%", "750", "7",  "0",  "20",
                                           "0",   "0",      "250", "6",   "10", "burglary",
                                           "1w"};
  const io::TableRow row = io::table_row_from_fields(fields);
  CHECK(row.hp.cell_w_ft == 250.0);
  CHECK(row.hp.cell_h_ft == 250.0);
  CHECK(row.coverage_pct == 95.0);
  CHECK(row.hp.coverage_param == 0.95);
  CHECK(row.hp.spatial_lengthscale_ft == 750.0);
  CHECK(row.hp.temporal_lengthscale_days == 7.0);
  CHECK(row.hp.n_frequencies == 20);
  CHECK(row.hp.l1_reg == 0.0);
  CHECK(row.hp.l2_reg == 0.0);
  CHECK(row.hp.kde_bandwidth_ft == 250.0);
  CHECK(row.hp.kde_lags == 6);
  CHECK(row.hp.kde_window_days == 10.0);
  CHECK(row.crime_type == "burglary");
  CHECK(row.horizon == "1w");

  const std::string csv = io::table_row_to_csv(row);
  CHECK(csv == "250,250,95%,750,7,0,20,0,0,250,6,10,burglary,1w");
  const io::TableRow back = io::table_row_from_fields(split_csv_line(csv));
  CHECK(back == row);

  std::vector<std::string> short_fields(fields.begin(), fields.end() - 1);
  CHECK_THROWS_AS(io::table_row_from_fields(short_fields), ValidationError);
}

TEST_CASE("the shipped submission table parses to twenty distinct rows") {
  const auto rows = io::load_table_csv(testutil::source_dir() + "/data/table_a1.csv");
  REQUIRE(rows.size() == 20);
  std::set<std::string> labels;
  for (const auto& row : rows) {
    labels.insert(row.crime_type + "/" + row.horizon);
    CHECK(row.hp.cell_w_ft * row.hp.cell_h_ft >= geom::kMinCellAreaSqft);
    CHECK(row.hp.cell_w_ft * row.hp.cell_h_ft <= geom::kMaxCellAreaSqft);
    CHECK(row.hp.coverage_param >= 0.0);
    CHECK(row.hp.coverage_param <= 1.0);
  }
  CHECK(labels.size() == 20);
}
