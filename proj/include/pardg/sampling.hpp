#pragma once

#include <utility>

#include "pardg/prng.hpp"
#include "pardg/types.hpp"

namespace pardg {

/// Rounds a fractional point to a set: coordinate i is kept independently
/// with probability x_i. A fixed seed gives the same set on every platform.
inline IndexSet independent_round(const Point& x, std::uint64_t seed) {
  validate_box_point(x);
  CounterRng rng(seed, "independent_round");
  IndexSet out;
  for (std::uint32_t i = 0; i < x.size(); ++i) {
    if (rng.next_double() < x[i]) out.push_back(i);
  }
  return out;
}

inline Point random_box_point(std::size_t n, CounterRng& rng) {
  Point x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rng.next_double();
  return x;
}

/// Ordered pair x <= y via x = u o v, y = u with u, v uniform on the box.
/// Covers boundary and interior without rejection sampling.
inline std::pair<Point, Point> random_box_pair(std::size_t n, CounterRng& rng) {
  Point y = random_box_point(n, rng);
  Point x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] * rng.next_double();
  return {std::move(x), std::move(y)};
}

}  // namespace pardg
