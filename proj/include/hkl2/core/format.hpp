#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace hkl2 {

/// Shortest-form-independent rendering with 17 significant digits, so the
/// text round-trips to the same double and is stable across runs.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

} // namespace hkl2
