#pragma once

#include <cerrno>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cpcv/error.hpp"
#include "cpcv/signal.hpp"

namespace cpcv {

/// Reads one design point per line, d comma-separated numeric columns.
/// Blank lines are skipped; `header` skips the first line.
inline Series read_series_csv(std::istream& in, bool header = false) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  std::vector<double> data;
  if (header) {
    std::getline(in, line);
    ++line_no;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t cols = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const char* begin = field.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == begin || *end != '\0' || errno == ERANGE) {
        throw error(errc::parse_error, "line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
      }
      data.push_back(v);
      ++cols;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (d == 0) d = cols;
    if (cols != d) {
      throw error(errc::parse_error, "line " + std::to_string(line_no) + ": expected " + std::to_string(d) +
                                         " columns, found " + std::to_string(cols));
    }
  }
  if (d == 0) throw error(errc::parse_error, "no data rows");
  const std::size_t n = data.size() / d;
  if (n < 2) throw error(errc::bad_series, "need at least 2 observations");
  return Series(n, d, std::move(data));
}

inline void write_series_csv(std::ostream& out, const Series& series) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < series.n(); ++i) {
    auto r = series.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << '\n';
  }
  out.precision(old);
}

}  // namespace cpcv
