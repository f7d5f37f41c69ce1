#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace quadsac {

// Shortest decimal form that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace quadsac
