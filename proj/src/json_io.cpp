#include "hotspot/json_io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hotspot/csv.hpp"
#include "hotspot/errors.hpp"

namespace hotspot::io {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open JSON file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write JSON file: " + path);
  out << j.dump(2) << "\n";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ValidationError("missing or non-numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

int require_int(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ValidationError("missing or non-integer field '" + key + "'");
  }
  return j.at(key).get<int>();
}

std::string require_string(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ValidationError("missing or non-string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

double parse_double_field(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ValidationError("cannot parse " + what + " from '" + text + "'");
  }
  return v;
}

}  // namespace

json grid_to_json(const geom::GridSpec& grid) {
  return json{{"cell_w_ft", grid.cell_w_ft}, {"cell_h_ft", grid.cell_h_ft},
              {"rotation_rad", grid.rotation_rad}, {"origin_x", grid.origin_x},
              {"origin_y", grid.origin_y},   {"n_cols", grid.n_cols},
              {"n_rows", grid.n_rows}};
}

geom::GridSpec grid_from_json(const json& j) {
  geom::GridSpec grid;
  grid.cell_w_ft = require_number(j, "cell_w_ft");
  grid.cell_h_ft = require_number(j, "cell_h_ft");
  grid.rotation_rad = require_number(j, "rotation_rad");
  grid.origin_x = require_number(j, "origin_x");
  grid.origin_y = require_number(j, "origin_y");
  grid.n_cols = require_int(j, "n_cols");
  grid.n_rows = require_int(j, "n_rows");
  if (grid.n_cols <= 0 || grid.n_rows <= 0 || !(grid.cell_w_ft > 0.0) ||
      !(grid.cell_h_ft > 0.0)) {
    throw ValidationError("grid JSON has non-positive dimensions");
  }
  return grid;
}

json hyperparams_to_json(const search::HyperParams& hp) {
  return json{{"cell_w_ft", hp.cell_w_ft},
              {"cell_h_ft", hp.cell_h_ft},
              {"coverage_param", hp.coverage_param},
              {"spatial_lengthscale_ft", hp.spatial_lengthscale_ft},
              {"temporal_lengthscale_days", hp.temporal_lengthscale_days},
              {"rotation_rad", hp.rotation_rad},
              {"d", hp.n_frequencies},
              {"a", hp.l1_reg},
              {"b", hp.l2_reg},
              {"kde_bandwidth_ft", hp.kde_bandwidth_ft},
              {"kde_lags", hp.kde_lags},
              {"kde_window_days", hp.kde_window_days},
              {"kernel_family", rff::to_string(hp.kernel_family)},
              {"seed", hp.seed}};
}

search::HyperParams hyperparams_from_json(const json& j) {
  search::HyperParams hp;
  hp.cell_w_ft = require_number(j, "cell_w_ft");
  hp.cell_h_ft = require_number(j, "cell_h_ft");
  hp.coverage_param = require_number(j, "coverage_param");
  hp.spatial_lengthscale_ft = require_number(j, "spatial_lengthscale_ft");
  hp.temporal_lengthscale_days = require_number(j, "temporal_lengthscale_days");
  hp.rotation_rad = require_number(j, "rotation_rad");
  hp.n_frequencies = require_int(j, "d");
  hp.l1_reg = require_number(j, "a");
  hp.l2_reg = require_number(j, "b");
  hp.kde_bandwidth_ft = require_number(j, "kde_bandwidth_ft");
  hp.kde_lags = require_int(j, "kde_lags");
  hp.kde_window_days = require_number(j, "kde_window_days");
  hp.kernel_family = rff::kernel_family_from_string(require_string(j, "kernel_family"));
  if (!j.contains("seed") || !j.at("seed").is_number()) {
    throw ValidationError("missing or non-numeric field 'seed'");
  }
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

std::string config_hash(const search::HyperParams& hp) {
  const std::string dump = hyperparams_to_json(hp).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : dump) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json model_to_json(const glm::ModelParams& params, const glm::FitReport& report,
                   std::uint64_t seed, const std::string& config_hash) {
  json gamma = json::array();
  for (Eigen::Index i = 0; i < params.gamma.size(); ++i) gamma.push_back(params.gamma(i));
  json beta = json::array();
  for (Eigen::Index i = 0; i < params.beta.size(); ++i) beta.push_back(params.beta(i));
  return json{{"gamma", gamma},
              {"beta", beta},
              {"a", params.l1_weight},
              {"b", params.l2_weight},
              {"seed", seed},
              {"config_hash", config_hash},
              {"fit_report",
               {{"objective_value", report.objective_value},
                {"epochs", report.epochs},
                {"converged", report.converged},
                {"grad_max_norm", report.grad_max_norm},
                {"eta_clamped", report.eta_clamped}}}};
}

glm::ModelParams model_params_from_json(const json& j) {
  glm::ModelParams params;
  if (!j.contains("gamma") || !j.at("gamma").is_array() || !j.contains("beta") ||
      !j.at("beta").is_array()) {
    throw ValidationError("model JSON must contain gamma and beta arrays");
  }
  const auto& g = j.at("gamma");
  const auto& b = j.at("beta");
  params.gamma.resize(static_cast<Eigen::Index>(g.size()));
  for (size_t i = 0; i < g.size(); ++i) params.gamma(static_cast<Eigen::Index>(i)) = g[i];
  params.beta.resize(static_cast<Eigen::Index>(b.size()));
  for (size_t i = 0; i < b.size(); ++i) params.beta(static_cast<Eigen::Index>(i)) = b[i];
  params.l1_weight = require_number(j, "a");
  params.l2_weight = require_number(j, "b");
  return params;
}

json score_report_to_json(const metrics::ScoreReport& rep) {
  return json{{"n", rep.n},
              {"n_star", rep.n_star},
              {"T", rep.T},
              {"hit_rate", rep.hit_rate},
              {"pai", rep.pai},
              {"pei", rep.pei},
              {"area_sqft", rep.area_sqft},
              {"region_area_sqft", rep.region_area_sqft},
              {"pei_vacuous", rep.pei_vacuous}};
}

json synth_spec_to_json(const synth::SynthSpec& spec) {
  json bumps = json::array();
  for (const auto& b : spec.bumps) {
    bumps.push_back(json{{"peak_rate", b.peak_rate},
                         {"center_x", b.center_x},
                         {"center_y", b.center_y},
                         {"scale_ft", b.scale_ft}});
  }
  return json{{"region",
               {{"min_x", spec.region.min_x},
                {"min_y", spec.region.min_y},
                {"max_x", spec.region.max_x},
                {"max_y", spec.region.max_y},
                {"total_area_sqft", spec.region.total_area_sqft}}},
              {"horizon_days", spec.horizon_days},
              {"uniform_rate", spec.uniform_rate},
              {"bumps", bumps},
              {"hawkes_branching", spec.hawkes_branching},
              {"trigger_spatial_ft", spec.trigger_spatial_ft},
              {"trigger_temporal_days", spec.trigger_temporal_days},
              {"seed", spec.seed}};
}

synth::SynthSpec synth_spec_from_json(const json& j) {
  synth::SynthSpec spec;
  if (!j.contains("region") || !j.at("region").is_object()) {
    throw ValidationError("synthetic spec needs a region object");
  }
  const auto& r = j.at("region");
  spec.region.min_x = require_number(r, "min_x");
  spec.region.min_y = require_number(r, "min_y");
  spec.region.max_x = require_number(r, "max_x");
  spec.region.max_y = require_number(r, "max_y");
  spec.region.total_area_sqft = r.contains("total_area_sqft")
                                    ? require_number(r, "total_area_sqft")
                                    : spec.region.bbox_area_sqft();
  spec.horizon_days = require_number(j, "horizon_days");
  spec.uniform_rate = j.contains("uniform_rate") ? require_number(j, "uniform_rate") : 0.0;
  if (j.contains("bumps")) {
    for (const auto& b : j.at("bumps")) {
      spec.bumps.push_back(synth::GaussianBump{require_number(b, "peak_rate"),
                                               require_number(b, "center_x"),
                                               require_number(b, "center_y"),
                                               require_number(b, "scale_ft")});
    }
  }
  if (j.contains("hawkes_branching")) spec.hawkes_branching = require_number(j, "hawkes_branching");
  if (j.contains("trigger_spatial_ft")) {
    spec.trigger_spatial_ft = require_number(j, "trigger_spatial_ft");
  }
  if (j.contains("trigger_temporal_days")) {
    spec.trigger_temporal_days = require_number(j, "trigger_temporal_days");
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

search::SearchSpace search_space_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("search space must be a JSON object");
  search::SearchSpace space;
  for (const auto& [key, value] : j.items()) {
    if (key == "kernel_family") {
      if (!value.is_array()) throw ValidationError("kernel_family must list family names");
      for (const auto& name : value) {
        space.kernel_families.push_back(
            rff::kernel_family_from_string(name.get<std::string>()));
      }
      continue;
    }
    if (!value.is_array() || value.empty()) {
      throw ValidationError("search space field '" + key + "' must be a non-empty list");
    }
    std::vector<double> values;
    for (const auto& v : value) {
      if (!v.is_number()) {
        throw ValidationError("search space field '" + key + "' has a non-numeric entry");
      }
      values.push_back(v.get<double>());
    }
    space.numeric.emplace_back(key, std::move(values));
  }
  if (space.numeric.empty() && space.kernel_families.empty()) {
    throw ValidationError("search space is empty");
  }
  return space;
}

TableRow table_row_from_fields(std::span<const std::string> fields) {
  if (fields.size() != 14) {
    throw ValidationError("Table-style row needs 14 fields, got " +
                          std::to_string(fields.size()));
  }
  TableRow row;
  row.hp.cell_w_ft = parse_double_field(fields[0], "cell_w_ft");
  row.hp.cell_h_ft = parse_double_field(fields[1], "cell_h_ft");
  std::string pct = fields[2];
  if (!pct.empty() && pct.back() == '%') pct.pop_back();
  row.coverage_pct = parse_double_field(pct, "coverage");
  row.hp.coverage_param = row.coverage_pct / 100.0;
  row.hp.spatial_lengthscale_ft = parse_double_field(fields[3], "spatial_lengthscale_ft");
  row.hp.temporal_lengthscale_days =
      parse_double_field(fields[4], "temporal_lengthscale_days");
  row.hp.rotation_rad = parse_double_field(fields[5], "rotation_rad");
  row.hp.n_frequencies = static_cast<int>(parse_double_field(fields[6], "d"));
  row.hp.l1_reg = parse_double_field(fields[7], "a");
  row.hp.l2_reg = parse_double_field(fields[8], "b");
  row.hp.kde_bandwidth_ft = parse_double_field(fields[9], "kde_bandwidth_ft");
  row.hp.kde_lags = static_cast<int>(parse_double_field(fields[10], "kde_lags"));
  row.hp.kde_window_days = parse_double_field(fields[11], "kde_window_days");
  row.crime_type = fields[12];
  row.horizon = fields[13];
  row.hp.kernel_family = rff::KernelFamily::matern52;  // the submitted models' kernel
  row.hp.seed = 0;
  return row;
}

std::string table_row_to_csv(const TableRow& row) {
  std::string out;
  out += format_double(row.hp.cell_w_ft);
  out += ",";
  out += format_double(row.hp.cell_h_ft);
  out += ",";
  out += format_double(row.coverage_pct) + "%";
  out += ",";
  out += format_double(row.hp.spatial_lengthscale_ft);
  out += ",";
  out += format_double(row.hp.temporal_lengthscale_days);
  out += ",";
  out += format_double(row.hp.rotation_rad);
  out += ",";
  out += std::to_string(row.hp.n_frequencies);
  out += ",";
  out += format_double(row.hp.l1_reg);
  out += ",";
  out += format_double(row.hp.l2_reg);
  out += ",";
  out += format_double(row.hp.kde_bandwidth_ft);
  out += ",";
  out += std::to_string(row.hp.kde_lags);
  out += ",";
  out += format_double(row.hp.kde_window_days);
  out += ",";
  out += row.crime_type;
  out += ",";
  out += row.horizon;
  return out;
}

std::vector<TableRow> load_table_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::vector<TableRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& fields : table.rows) {
    rows.push_back(table_row_from_fields(fields));
  }
  return rows;
}

}  // namespace hotspot::io
