#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace atomslab {

// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("failed to format number");
  return std::string(buf, ptr);
}

} // namespace atomslab
