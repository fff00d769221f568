#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace tasep::io {

// 12 significant digits, locale-independent; keeps regression diffs stable
inline std::string format_sig(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

using CsvRow = std::vector<std::string>;

inline void emit_csv(std::ostream& os, const CsvRow& header,
                     const std::vector<CsvRow>& rows) {
  auto write_row = [&](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  };
  write_row(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ValidationError("emit_csv: record does not match schema");
    write_row(row);
  }
}

}  // namespace tasep::io
