#pragma once

#include <charconv>
#include <string>

namespace isac_edge::detail {

// Shortest decimal text that parses back to the same double.
inline std::string shortest(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace isac_edge::detail
