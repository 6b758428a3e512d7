#pragma once

#include <string>
#include <vector>

namespace hotspot {

// Minimal CSV support for the project's own flat formats: comma separators,
// no quoting, one header line. Trailing '\r' is stripped so CRLF files load.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Throws ValidationError if the file cannot be opened or has no header.
CsvTable read_csv(const std::string& path);

}  // namespace hotspot
