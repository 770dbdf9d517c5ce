#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace ptim {

// Fixed textual form for CSV output so reruns are byte-identical.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace ptim
