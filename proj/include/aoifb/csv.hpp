#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aoifb/types.hpp"

namespace aoifb {

/// Decimal rendering with 9 significant digits.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Writes `# `-prefixed comment lines, the header and the rows, with UNIX
/// line endings.
inline void write_csv(std::ostream& os, const CsvTable& table,
                      const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

/// Parses what write_csv emits: comment lines are skipped, the first
/// remaining line is the header, every row must match its width.
inline CsvTable parse_csv(std::istream& is) {
  CsvTable out;
  std::string raw;
  bool have_header = false;
  while (std::getline(is, raw)) {
    if (raw.empty() || raw.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!raw.empty() && raw.back() == ',') cells.emplace_back();
    if (!have_header) {
      out.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != out.header.size()) throw invalid_input("CSV row width mismatch");
      out.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw invalid_input("CSV input has no header row");
  return out;
}

}  // namespace aoifb
