#pragma once

#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>
#include <vector>

#include "hotspot/geometry.hpp"
#include "hotspot/metrics.hpp"
#include "hotspot/poisson_glm.hpp"
#include "hotspot/search.hpp"
#include "hotspot/synth.hpp"

namespace hotspot::io {

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

nlohmann::json grid_to_json(const geom::GridSpec& grid);
geom::GridSpec grid_from_json(const nlohmann::json& j);

// Flat object with exactly the hyperparameter field names:
// cell_w_ft, cell_h_ft, coverage_param, spatial_lengthscale_ft,
// temporal_lengthscale_days, rotation_rad, d, a, b, kde_bandwidth_ft,
// kde_lags, kde_window_days, kernel_family, seed.
nlohmann::json hyperparams_to_json(const search::HyperParams& hp);
search::HyperParams hyperparams_from_json(const nlohmann::json& j);

// FNV-1a over the canonical dump; stored with saved models for audit.
std::string config_hash(const search::HyperParams& hp);

nlohmann::json model_to_json(const glm::ModelParams& params, const glm::FitReport& report,
                             std::uint64_t seed, const std::string& config_hash);
glm::ModelParams model_params_from_json(const nlohmann::json& j);

nlohmann::json score_report_to_json(const metrics::ScoreReport& rep);

nlohmann::json synth_spec_to_json(const synth::SynthSpec& spec);
synth::SynthSpec synth_spec_from_json(const nlohmann::json& j);

// Flat key = list-of-values; under BO the [min, max] envelope of each list is
// the search box. kernel_family lists family names.
search::SearchSpace search_space_from_json(const nlohmann::json& j);

// One Table A1-style CSV row: grid dims, coverage percent, lengthscales,
// rotation, d, l1, l2, KDE bandwidth/lags/window, crime type, horizon.
struct TableRow {
  search::HyperParams hp;
  double coverage_pct = 0.0;  // raw percent column; hp.coverage_param = pct / 100
  std::string crime_type;
  std::string horizon;

  bool operator==(const TableRow&) const = default;
};

inline constexpr const char* kTableCsvHeader =
    "cell_w_ft,cell_h_ft,coverage,spatial_lengthscale_ft,temporal_lengthscale_days,"
    "rotation_rad,d,a,b,kde_bandwidth_ft,kde_lags,kde_window_days,crime_type,horizon";

TableRow table_row_from_fields(std::span<const std::string> fields);
std::string table_row_to_csv(const TableRow& row);
std::vector<TableRow> load_table_csv(const std::string& path);

}  // namespace hotspot::io
