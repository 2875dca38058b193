#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pardg {

using Point = std::vector<double>;
using Gradient = std::vector<double>;
using IndexSet = std::vector<std::uint32_t>;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Coordinate-wise min with the all-ones vector, extending a box function to
/// the positive orthant. Entries must be finite and non-negative.
inline Point clamp_extend(std::span<const double> x) {
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && x[i] >= 0.0,
            "clamp_extend: entries must be finite and >= 0");
    out[i] = std::min(x[i], 1.0);
  }
  return out;
}

inline void validate_box_point(std::span<const double> x) {
  for (double v : x) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
            "point must lie in the unit box");
  }
}

/// Inner product accumulated in ascending index order (bitwise reproducible).
inline double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline bool leq(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > y[i]) return false;
  }
  return true;
}

inline Point join(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "join: dimension mismatch");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i], y[i]);
  return out;
}

inline Point meet(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "meet: dimension mismatch");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::min(x[i], y[i]);
  return out;
}

inline double max_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

/// Shortest round-trip decimal representation; used for every number the
/// library writes to a file so that reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace pardg
