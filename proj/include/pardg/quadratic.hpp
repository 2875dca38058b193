#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "pardg/types.hpp"

namespace pardg {

/// Concave quadratic f(x) = c + <b, x> - x' A x / 2 with Hessian -(A + A')/2.
/// A non-negative A makes every Hessian entry non-positive, so f has
/// diminishing returns. Generated instances pick c so that f >= 0 on the box;
/// construction itself does not enforce the invariants (tests build
/// deliberately broken instances as negative controls), use
/// validate_quadratic for generated data.
struct QuadraticDrInstance {
  double c = 0.0;
  std::vector<double> b;
  std::vector<std::vector<double>> a;  // n rows of n entries

  std::size_t dimension() const { return b.size(); }

  double value(const Point& xin) const {
    require(xin.size() == b.size(), "quadratic value: dimension mismatch");
    const Point x = clamp_extend(xin);
    double acc = c;
    for (std::size_t i = 0; i < x.size(); ++i) acc += b[i] * x[i];
    double quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        quad += x[i] * a[i][j] * x[j];
      }
    }
    return acc - 0.5 * quad;
  }

  Gradient gradient(const Point& xin) const {
    require(xin.size() == b.size(), "quadratic gradient: dimension mismatch");
    const Point x = clamp_extend(xin);
    Gradient g(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        acc += (a[i][j] + a[j][i]) * x[j];
      }
      g[i] = b[i] - 0.5 * acc;
    }
    return g;
  }
};

/// Checks the invariants generated instances promise: A >= 0 entrywise and
/// c large enough that f >= 0 everywhere on the box.
inline void validate_quadratic(const QuadraticDrInstance& q) {
  const std::size_t n = q.b.size();
  require(q.a.size() == n, "quadratic: A must be n x n");
  double neg_b = 0.0;
  double sum_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(q.a[i].size() == n, "quadratic: A must be n x n");
    if (q.b[i] < 0.0) neg_b -= q.b[i];
    for (double v : q.a[i]) {
      require(std::isfinite(v) && v >= 0.0,
              "quadratic: A entries must be finite and >= 0");
      sum_a += v;
    }
  }
  require(q.c >= neg_b + 0.5 * sum_a - 1e-12,
          "quadratic: c too small for non-negativity on the box");
}

// Text format: "n <n>", "c <c>", "b <n floats>", then n lines "A <n floats>".
inline void write_quadratic(std::ostream& os, const QuadraticDrInstance& q) {
  const std::size_t n = q.b.size();
  os << "n " << n << '\n';
  os << "c " << format_double(q.c) << '\n';
  os << "b";
  for (double v : q.b) os << ' ' << format_double(v);
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << "A";
    for (double v : q.a[i]) os << ' ' << format_double(v);
    os << '\n';
  }
}

inline QuadraticDrInstance read_quadratic(std::istream& is) {
  QuadraticDrInstance q;
  std::string key;
  std::size_t n = 0;
  if (!(is >> key >> n) || key != "n") {
    throw std::invalid_argument("quadratic: expected 'n <count>'");
  }
  if (!(is >> key >> q.c) || key != "c") {
    throw std::invalid_argument("quadratic: expected 'c <value>'");
  }
  if (!(is >> key) || key != "b") {
    throw std::invalid_argument("quadratic: expected 'b <n floats>'");
  }
  q.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> q.b[i])) throw std::invalid_argument("quadratic: short b row");
  }
  q.a.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> key) || key != "A") {
      throw std::invalid_argument("quadratic: expected n 'A' rows");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(is >> q.a[i][j])) {
        throw std::invalid_argument("quadratic: short A row");
      }
    }
  }
  return q;
}

}  // namespace pardg
