#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

#include "hfl/core/error.hpp"

namespace hfl {

// All floats written to disk use 9 significant digits.
inline std::string format_g9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

// Rounds a value to what survives a 9-digit write/read cycle.
inline double quantize_g9(double value) { return std::strtod(format_g9(value).c_str(), nullptr); }

inline double parse_double(std::string_view text, const std::string& context) {
  std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    fail(ErrorKind::SchemaMismatch, "not a number '" + s + "' in " + context);
  return v;
}

inline long long parse_int(std::string_view text, const std::string& context) {
  long long v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    fail(ErrorKind::SchemaMismatch, "not an integer '" + std::string(text) + "' in " + context);
  return v;
}

}  // namespace hfl
