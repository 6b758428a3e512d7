#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotspot/dates.hpp"
#include "hotspot/geometry.hpp"

namespace hotspot::events {

struct EventRecord {
  std::string category;
  double t_days = 0.0;  // days since the dataset epoch
  double x_ft = 0.0;
  double y_ft = 0.0;
};

// Contiguous half-open periods (left-open, right-closed] counted backward from
// horizon_start_day: period p covers (t_h - (p+1)*D, t_h - p*D].
struct TemporalWindowing {
  double period_days = 0.0;
  double horizon_start_day = 0.0;
  int n_periods = 0;

  double period_open_start(int p) const { return horizon_start_day - (p + 1) * period_days; }
  double period_end(int p) const { return horizon_start_day - p * period_days; }
  std::optional<int> period_of(double t) const;
  void validate() const;
};

struct AggregatedCube {
  geom::GridSpec grid;
  TemporalWindowing windowing;
  std::vector<std::int64_t> counts;  // period-major: counts[p * n_cells + flat_id]
  std::int64_t n_dropped = 0;        // outside coverage or outside all periods

  std::int64_t at(int period, std::int64_t flat_id) const;
  std::int64_t total() const;
};

// CSV with header "category,date,x_ft,y_ft"; date is an ISO-8601 calendar
// date, converted to whole days since `epoch`. An empty category_filter keeps
// everything. Malformed rows (bad field count, bad date, non-numeric
// coordinates, date before epoch) throw with the 1-based line number. A
// non-empty filter matching nothing in a non-empty file appends a warning.
std::vector<EventRecord> load_events(const std::string& path, const std::string& category_filter,
                                     const CivilDate& epoch,
                                     std::vector<std::string>* warnings = nullptr);

// counts[p][c] = number of events with t in period p landing in cell c.
// Events outside the grid or outside every period are dropped and counted.
AggregatedCube aggregate(std::span<const EventRecord> events, const geom::GridSpec& grid,
                         const TemporalWindowing& windowing);

void write_cube_csv(const AggregatedCube& cube, const std::string& path);

void write_events_csv(std::span<const EventRecord> events, const std::string& path,
                      const CivilDate& epoch);

}  // namespace hotspot::events
