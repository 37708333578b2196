#pragma once

#include <cstdio>
#include <string>

namespace evotrack {

/// Shortest-faithful double formatting used by every text artifact, so that
/// identical runs produce byte-identical files.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace evotrack
