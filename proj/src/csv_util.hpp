#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

// Internal text-format helpers shared by the CSV and moment-file writers.

namespace sml::detail {

// 17 significant digits: enough for exact double round-trips.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Comma-separated fields parsed with strtod, which (unlike stream
// extraction in libstdc++) accepts "nan" and "inf".
inline std::vector<double> parse_csv_row(const std::string& line, std::size_t expected,
                                         const std::string& path) {
  std::vector<double> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string cell = line.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str())
      throw std::runtime_error("bad CSV field '" + cell + "' in " + path);
    fields.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  if (fields.size() != expected)
    throw std::runtime_error("bad CSV row width in " + path);
  return fields;
}

}  // namespace sml::detail
