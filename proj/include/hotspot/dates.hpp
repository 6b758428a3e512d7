#pragma once

#include <cstdint>
#include <string>

namespace hotspot {

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  bool operator==(const CivilDate&) const = default;
};

// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(const CivilDate& d);

// Strict "YYYY-MM-DD". Throws ValidationError with the offending text.
CivilDate parse_iso_date(const std::string& text);

std::string format_iso_date(const CivilDate& d);

}  // namespace hotspot
