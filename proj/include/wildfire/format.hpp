#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace wildfire {

// Shortest decimal string that round-trips the double exactly. Keeps CSV
// output byte-stable across runs and platforms.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace wildfire
