#ifndef SPLITOBS_FORMAT_HPP_
#define SPLITOBS_FORMAT_HPP_

#include <cstdio>
#include <string>

namespace splitobs {

// 17 significant digits: enough for bit-stable double round-trips in CSV.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace splitobs

#endif  // SPLITOBS_FORMAT_HPP_
