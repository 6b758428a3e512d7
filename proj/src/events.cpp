#include "hotspot/events.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hotspot/errors.hpp"

namespace hotspot::events {

void TemporalWindowing::validate() const {
  if (!(period_days > 0.0)) throw ValidationError("period_days must be positive");
  if (n_periods <= 0) throw ValidationError("n_periods must be positive");
}

std::optional<int> TemporalWindowing::period_of(double t) const {
  // Period p holds t iff t_h - (p+1)*D < t <= t_h - p*D.
  const double p_real = (horizon_start_day - t) / period_days;
  if (p_real < 0.0) return std::nullopt;
  const int p = static_cast<int>(std::floor(p_real));
  if (p >= n_periods) return std::nullopt;
  return p;
}

std::int64_t AggregatedCube::at(int period, std::int64_t flat_id) const {
  return counts[static_cast<size_t>(period) * static_cast<size_t>(grid.n_cells()) +
                static_cast<size_t>(flat_id)];
}

std::int64_t AggregatedCube::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::vector<EventRecord> load_events(const std::string& path, const std::string& category_filter,
                                     const CivilDate& epoch, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open events file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("events file has no header: " + path);

  const std::int64_t epoch_days = days_from_civil(epoch);
  std::vector<EventRecord> out;
  long line_no = 1;
  long data_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ++data_rows;
    const auto fail = [&](const std::string& what) -> void {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    std::vector<std::string> fields;
    {
      std::string cur;
      for (const char c : line) {
        if (c == ',') {
          fields.push_back(cur);
          cur.clear();
        } else if (c != '\r') {
          cur.push_back(c);
        }
      }
      fields.push_back(cur);
    }
    if (fields.size() != 4) fail("expected 4 fields category,date,x_ft,y_ft");
    if (!category_filter.empty() && fields[0] != category_filter) continue;
    EventRecord rec;
    rec.category = fields[0];
    std::int64_t day = 0;
    try {
      day = days_from_civil(parse_iso_date(fields[1])) - epoch_days;
    } catch (const ValidationError& e) {
      fail(e.what());
    }
    if (day < 0) fail("date " + fields[1] + " precedes the dataset epoch");
    rec.t_days = static_cast<double>(day);
    try {
      size_t used = 0;
      rec.x_ft = std::stod(fields[2], &used);
      if (used != fields[2].size()) fail("non-numeric x_ft '" + fields[2] + "'");
      rec.y_ft = std::stod(fields[3], &used);
      if (used != fields[3].size()) fail("non-numeric y_ft '" + fields[3] + "'");
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      fail("non-numeric coordinate");
    }
    if (!std::isfinite(rec.x_ft) || !std::isfinite(rec.y_ft)) fail("non-finite coordinate");
    out.push_back(std::move(rec));
  }
  if (warnings && !category_filter.empty() && out.empty() && data_rows > 0) {
    warnings->push_back("category filter '" + category_filter + "' matched none of " +
                        std::to_string(data_rows) + " rows in " + path);
  }
  return out;
}

AggregatedCube aggregate(std::span<const EventRecord> events, const geom::GridSpec& grid,
                         const TemporalWindowing& windowing) {
  windowing.validate();
  AggregatedCube cube;
  cube.grid = grid;
  cube.windowing = windowing;
  cube.counts.assign(static_cast<size_t>(windowing.n_periods) * static_cast<size_t>(grid.n_cells()),
                     0);
  for (const auto& ev : events) {
    const auto period = windowing.period_of(ev.t_days);
    if (!period) {
      ++cube.n_dropped;
      continue;
    }
    const auto cell = geom::try_point_to_cell(grid, ev.x_ft, ev.y_ft);
    if (!cell) {
      ++cube.n_dropped;
      continue;
    }
    ++cube.counts[static_cast<size_t>(*period) * static_cast<size_t>(grid.n_cells()) +
                  static_cast<size_t>(cell->flat_id)];
  }
  return cube;
}

void write_cube_csv(const AggregatedCube& cube, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write cube CSV: " + path);
  out << "period,flat_id,count\n";
  for (int p = 0; p < cube.windowing.n_periods; ++p) {
    for (std::int64_t c = 0; c < cube.grid.n_cells(); ++c) {
      const std::int64_t v = cube.at(p, c);
      if (v != 0) out << p << "," << c << "," << v << "\n";
    }
  }
}

void write_events_csv(std::span<const EventRecord> events, const std::string& path,
                      const CivilDate& epoch) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write events CSV: " + path);
  out << "category,date,x_ft,y_ft\n";
  const std::int64_t epoch_days = days_from_civil(epoch);
  char buf[128];
  for (const auto& ev : events) {
    // Day-grained on disk: intra-day times floor to the calendar day.
    const std::int64_t day = epoch_days + static_cast<std::int64_t>(std::floor(ev.t_days));
    CivilDate d;
    // Invert days_from_civil (Hinnant's civil_from_days).
    {
      std::int64_t z = day + 719468;
      const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
      const unsigned doe = static_cast<unsigned>(z - era * 146097);
      const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
      const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
      const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
      const unsigned mp = (5 * doy + 2) / 153;
      const unsigned dd = doy - (153 * mp + 2) / 5 + 1;
      const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
      d.year = static_cast<int>(y + (m <= 2));
      d.month = static_cast<int>(m);
      d.day = static_cast<int>(dd);
    }
    std::snprintf(buf, sizeof(buf), "%s,%s,%.3f,%.3f\n", ev.category.c_str(),
                  format_iso_date(d).c_str(), ev.x_ft, ev.y_ft);
    out << buf;
  }
}

}  // namespace hotspot::events
