#pragma once

#include <cstdint>

#include "pardg/graph.hpp"
#include "pardg/prng.hpp"
#include "pardg/quadratic.hpp"

namespace pardg {

struct CutGenParams {
  std::uint32_t n = 12;
  double edge_probability = 0.5;
  double weight_max = 1.0;
  bool directed = true;
  bool unit_weights = false;
};

/// Erdos-Renyi style instance, fully determined by (seed, index). Pairs are
/// visited in ascending (tail, head) order; weights are uniform in
/// (0, weight_max] unless unit_weights is set.
inline WeightedDigraph generate_cut_instance(const CutGenParams& params,
                                             std::uint64_t seed,
                                             std::uint32_t index) {
  require(params.n >= 1, "generate_cut_instance: n must be >= 1");
  require(params.edge_probability >= 0.0 && params.edge_probability <= 1.0,
          "generate_cut_instance: edge probability must be in [0, 1]");
  require(params.weight_max > 0.0, "generate_cut_instance: weight_max must be > 0");
  CounterRng rng(seed, "gen_cut", index);
  WeightedDigraph g;
  g.n = params.n;
  g.directed = params.directed;
  for (std::uint32_t u = 0; u < params.n; ++u) {
    const std::uint32_t v_begin = params.directed ? 0 : u + 1;
    for (std::uint32_t v = v_begin; v < params.n; ++v) {
      if (v == u) continue;
      if (!rng.next_bernoulli(params.edge_probability)) continue;
      const double w =
          params.unit_weights ? 1.0 : params.weight_max * rng.next_double_pos();
      g.edges.push_back({u, v, w});
    }
  }
  return g;
}

struct QuadraticGenParams {
  std::uint32_t n = 4;
  double density = 0.5;  // mask probability for entries of A
};

/// Density-masked quadratic with b uniform in [-1, 1], A uniform in (0, 1]
/// where the mask hits, and c set constructively so that f >= 0 on the box.
inline QuadraticDrInstance generate_quadratic_instance(
    const QuadraticGenParams& params, std::uint64_t seed, std::uint32_t index) {
  require(params.n >= 1, "generate_quadratic_instance: n must be >= 1");
  require(params.density >= 0.0 && params.density <= 1.0,
          "generate_quadratic_instance: density must be in [0, 1]");
  CounterRng rng(seed, "gen_quadratic", index);
  const std::uint32_t n = params.n;
  QuadraticDrInstance q;
  q.b.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) q.b[i] = 2.0 * rng.next_double() - 1.0;
  q.a.assign(n, std::vector<double>(n, 0.0));
  double neg_b = 0.0;
  double sum_a = 0.0;
  for (double v : q.b) {
    if (v < 0.0) neg_b -= v;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (rng.next_bernoulli(params.density)) {
        q.a[i][j] = rng.next_double_pos();
        sum_a += q.a[i][j];
      }
    }
  }
  q.c = neg_b + 0.5 * sum_a;
  return q;
}

}  // namespace pardg
