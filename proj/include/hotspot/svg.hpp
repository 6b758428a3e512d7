#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotspot/events.hpp"
#include "hotspot/geometry.hpp"
#include "hotspot/rff_features.hpp"

namespace hotspot::io {

// Static hotspot map. With truth counts: green = selected and in the true
// top-k, blue = selected only (false positive), red = true top-k missed
// (false negative). Without truth the selection is drawn alone. Events, when
// given, appear as black dots.
std::string render_hotspot_map(const geom::GridSpec& grid,
                               std::span<const std::int64_t> chosen,
                               const std::vector<std::int64_t>* truth_counts,
                               std::span<const events::EventRecord> evs,
                               const std::vector<bool>* active = nullptr);

// Log-log style convergence curve for the RFF approximation report.
std::string render_error_curve(std::span<const rff::ApproximationRow> rows,
                               const std::string& title);

}  // namespace hotspot::io
