#pragma once

#include <cstdio>
#include <string>

namespace specflow {

/// Shortest form that round-trips: 17 significant digits, '.' decimal point.
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace specflow
