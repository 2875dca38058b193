#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pardg/batch.hpp"
#include "pardg/prng.hpp"
#include "pardg/types.hpp"

namespace pardg {

struct BruteForceResult {
  std::uint64_t best_mask = 0;
  double opt_value = 0.0;
};

/// Exact maximizer of a set function by enumeration in subset-index order;
/// ties keep the smallest index. Refuses n > 22.
template <typename SetFn>  // double(std::uint64_t mask)
BruteForceResult brute_force_opt(SetFn&& value_of, int n) {
  require(n >= 0 && n <= 22, "brute_force_opt: n must be in [0, 22]");
  BruteForceResult best{0, value_of(std::uint64_t{0})};
  const std::uint64_t limit = 1ull << n;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    const double v = value_of(mask);
    if (v > best.opt_value) best = {mask, v};
  }
  return best;
}

inline IndexSet mask_to_set(std::uint64_t mask, std::size_t n) {
  IndexSet out;
  for (std::uint32_t i = 0; i < n; ++i) {
    if ((mask >> i) & 1ull) out.push_back(i);
  }
  return out;
}

/// Best point of a uniform (k+1)^n grid over the box, scanned with coordinate
/// 0 as the fastest digit; strict improvement keeps the first maximizer. The
/// result is a certified lower bound on the box optimum, not the optimum.
template <DrOracle F>
std::pair<Point, double> grid_search_opt(const F& f, int n, int resolution) {
  require(n >= 1 && n <= 6, "grid_search_opt: n must be in [1, 6]");
  require(resolution >= 1 && resolution <= 21,
          "grid_search_opt: resolution must be in [1, 21]");
  require(static_cast<std::size_t>(n) == f.dimension(),
          "grid_search_opt: dimension mismatch");
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(resolution) + 1;
  Point best_x(n, 0.0);
  double best_v = f.value(best_x);
  Point x(n, 0.0);
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    std::uint64_t rem = idx;
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rem % (resolution + 1)) /
             static_cast<double>(resolution);
      rem /= resolution + 1;
    }
    const double v = f.value(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

/// Set-function analogue of BatchOracle: one call is one adaptive round, with
/// one value query per requested set.
template <typename SetFn>  // double(const std::vector<std::uint8_t>&)
class SetBatchOracle {
 public:
  explicit SetBatchOracle(SetFn fn) : fn_(std::move(fn)) {}

  std::vector<double> batch(std::span<const std::vector<std::uint8_t>> sets) {
    require(!sets.empty(), "set batch: empty request list");
    std::vector<double> out;
    out.reserve(sets.size());
    for (const auto& s : sets) out.push_back(fn_(s));
    stats_.value_queries += sets.size();
    stats_.adaptive_rounds += 1;
    return out;
  }

  const OracleStats& stats() const { return stats_; }

 private:
  SetFn fn_;
  OracleStats stats_;
};

/// One-pass double greedy between A (growing) and B (shrinking). Elements are
/// visited in ascending index order; both marginals of an element share one
/// round. The deterministic rule keeps an element when its add-marginal is at
/// least the delete-marginal; the randomized rule keeps it with probability
/// a+ / (a+ + b+) and deletes when both marginals are non-positive.
template <typename SetFn>
IndexSet sequential_double_greedy(SetBatchOracle<SetFn>& oracle, std::size_t n,
                                  bool randomized, std::uint64_t seed) {
  std::vector<std::uint8_t> a(n, 0);
  std::vector<std::uint8_t> b(n, 1);
  double f_a = 0.0;
  double f_b = 0.0;
  {
    const std::vector<std::uint8_t> init[2] = {a, b};
    auto r = oracle.batch(init);
    f_a = r[0];
    f_b = r[1];
  }
  CounterRng rng(seed, "sequential_double_greedy");
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 1;
    b[i] = 0;
    double f_a_add = 0.0;
    double f_b_del = 0.0;
    {
      const std::vector<std::uint8_t> reqs[2] = {a, b};
      auto r = oracle.batch(reqs);
      f_a_add = r[0];
      f_b_del = r[1];
    }
    const double gain_add = f_a_add - f_a;
    const double gain_del = f_b_del - f_b;
    bool add = false;
    if (!randomized) {
      add = gain_add >= gain_del;
    } else {
      const double ap = std::max(gain_add, 0.0);
      const double bp = std::max(gain_del, 0.0);
      add = (ap + bp > 0.0) && rng.next_double() < ap / (ap + bp);
    }
    if (add) {
      b[i] = 1;  // keep the element in both solutions
      f_a = f_a_add;
    } else {
      a[i] = 0;
      f_b = f_b_del;
    }
  }
  IndexSet out;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (a[i]) out.push_back(i);
  }
  return out;
}

/// Uniform random subset: each element kept independently with probability
/// 1/2. Never evaluates the function.
inline IndexSet random_half(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, "random_half");
  IndexSet out;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (rng.next_double() < 0.5) out.push_back(i);
  }
  return out;
}

}  // namespace pardg
