#pragma once

#include <cstdio>
#include <string>

namespace ccm {

/// Shortest-safe round-trip decimal: 17 significant digits.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* fmt_bool(bool v) { return v ? "true" : "false"; }

}  // namespace ccm
