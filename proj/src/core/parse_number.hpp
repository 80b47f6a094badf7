#pragma once

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

namespace phdmd::detail {

// Whole-token decimal parse. Unlike std::stod, gradual underflow (subnormal
// results written by %.17g) is accepted.
inline std::optional<double> parse_double(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) return std::nullopt;
  if (errno == ERANGE && std::abs(v) > 1.0) return std::nullopt;
  return v;
}

}  // namespace phdmd::detail
