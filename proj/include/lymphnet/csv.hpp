#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "types.hpp"

namespace lymphnet {

/// One output row. `trial` is -1 for summary rows.
struct CsvRow {
  double mass = 0.0;
  double exponent = 0.0;
  std::string model;
  std::string mode;
  TimingBreakdown timing;
  std::uint64_t seed = 0;
  std::int64_t trial = 0;
};

inline constexpr const char* kCsvHeader =
    "M,a,model,mode,t_detect,t_recruit,t_expand,t_total,seed,trial";

/// 9 significant digits.
inline std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_csv(std::span<const CsvRow> rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_sig9(r.mass) << ',' << format_sig9(r.exponent) << ',' << r.model << ','
       << r.mode << ',' << format_sig9(r.timing.t_detect) << ','
       << format_sig9(r.timing.t_recruit) << ',' << format_sig9(r.timing.t_expand) << ','
       << format_sig9(r.timing.t_total) << ',' << r.seed << ',' << r.trial << '\n';
  }
}

/// Writes with LF endings (binary mode) regardless of platform.
inline void write_csv(std::span<const CsvRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace lymphnet
