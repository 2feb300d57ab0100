#pragma once

#include <cstdio>
#include <string>

namespace noma {

/// Formats a double with 12 significant digits ("%.12g"): enough to make
/// sweep outputs byte-stable across runs without printing noise digits.
inline std::string csv_cell(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace noma
