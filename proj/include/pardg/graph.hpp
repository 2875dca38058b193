#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include "pardg/types.hpp"

namespace pardg {

struct Edge {
  std::uint32_t tail = 0;
  std::uint32_t head = 0;
  double weight = 0.0;
};

/// Weighted graph with a direction flag. For undirected graphs each pair is
/// stored once; evaluators treat the edge as crossing in either direction.
struct WeightedDigraph {
  std::uint32_t n = 0;
  bool directed = true;
  std::vector<Edge> edges;

  double total_weight() const {
    double acc = 0.0;
    for (const Edge& e : edges) acc += e.weight;
    return acc;
  }
};

inline void validate_graph(const WeightedDigraph& g) {
  for (const Edge& e : g.edges) {
    require(e.tail < g.n && e.head < g.n, "graph: vertex index out of range");
    require(e.tail != e.head, "graph: self-loops are not allowed");
    require(std::isfinite(e.weight) && e.weight >= 0.0,
            "graph: edge weights must be finite and >= 0");
  }
}

/// Exact multilinear relaxation of the cut value. Directed edges contribute
/// w * x_u * (1 - x_v); undirected edges contribute both orientations. Edge
/// terms accumulate in storage order.
inline double eval_cut_multilinear(const WeightedDigraph& g,
                                   std::span<const double> xin) {
  require(xin.size() == g.n, "eval_cut_multilinear: dimension mismatch");
  const Point x = clamp_extend(xin);
  double acc = 0.0;
  for (const Edge& e : g.edges) {
    if (g.directed) {
      acc += e.weight * x[e.tail] * (1.0 - x[e.head]);
    } else {
      acc += e.weight *
             (x[e.tail] * (1.0 - x[e.head]) + x[e.head] * (1.0 - x[e.tail]));
    }
  }
  return acc;
}

/// Gradient of the multilinear cut value. By multilinearity coordinate i
/// equals the value with x_i = 1 minus the value with x_i = 0.
inline Gradient grad_cut_multilinear(const WeightedDigraph& g,
                                     std::span<const double> xin) {
  require(xin.size() == g.n, "grad_cut_multilinear: dimension mismatch");
  const Point x = clamp_extend(xin);
  Gradient grad(g.n, 0.0);
  for (const Edge& e : g.edges) {
    if (g.directed) {
      grad[e.tail] += e.weight * (1.0 - x[e.head]);
      grad[e.head] -= e.weight * x[e.tail];
    } else {
      grad[e.tail] += e.weight * (1.0 - 2.0 * x[e.head]);
      grad[e.head] += e.weight * (1.0 - 2.0 * x[e.tail]);
    }
  }
  return grad;
}

/// Cut value of the vertex set S given by a membership predicate. Agrees
/// bitwise with eval_cut_multilinear at the indicator vector of S because
/// both walk the edge list in the same order and skipped terms are exact
/// zeros there.
template <typename MemberFn>
double set_eval_cut_fn(const WeightedDigraph& g, MemberFn&& in_s) {
  double acc = 0.0;
  for (const Edge& e : g.edges) {
    const bool tu = in_s(e.tail);
    const bool tv = in_s(e.head);
    if (g.directed) {
      if (tu && !tv) acc += e.weight;
    } else {
      if (tu != tv) acc += e.weight;
    }
  }
  return acc;
}

inline double set_eval_cut(const WeightedDigraph& g, std::uint64_t mask) {
  require(g.n <= 64, "set_eval_cut: mask form needs n <= 64");
  return set_eval_cut_fn(
      g, [mask](std::uint32_t v) { return (mask >> v) & 1ull; });
}

inline double set_eval_cut(const WeightedDigraph& g,
                           std::span<const std::uint32_t> members) {
  std::vector<std::uint8_t> in(g.n, 0);
  for (std::uint32_t v : members) {
    require(v < g.n, "set_eval_cut: vertex out of range");
    in[v] = 1;
  }
  return set_eval_cut_fn(g, [&in](std::uint32_t v) { return in[v] != 0; });
}

inline Point indicator_point(std::size_t n, std::uint64_t mask) {
  Point x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1ull ? 1.0 : 0.0;
  return x;
}

inline Point indicator_point(std::size_t n,
                             std::span<const std::uint32_t> members) {
  Point x(n, 0.0);
  for (std::uint32_t v : members) {
    require(v < n, "indicator_point: index out of range");
    x[v] = 1.0;
  }
  return x;
}

/// Multilinear cut oracle over a fixed graph.
struct CutInstance {
  WeightedDigraph graph;

  std::size_t dimension() const { return graph.n; }
  double value(const Point& x) const { return eval_cut_multilinear(graph, x); }
  Gradient gradient(const Point& x) const {
    return grad_cut_multilinear(graph, x);
  }
};

// Text format: line 1 "n m directed|undirected", then m lines
// "tail head weight".
inline void write_graph(std::ostream& os, const WeightedDigraph& g) {
  os << g.n << ' ' << g.edges.size() << ' '
     << (g.directed ? "directed" : "undirected") << '\n';
  for (const Edge& e : g.edges) {
    os << e.tail << ' ' << e.head << ' ' << format_double(e.weight) << '\n';
  }
}

inline WeightedDigraph read_graph(std::istream& is) {
  WeightedDigraph g;
  std::size_t m = 0;
  std::string kind;
  if (!(is >> g.n >> m >> kind)) {
    throw std::invalid_argument("graph: malformed header");
  }
  if (kind == "directed") {
    g.directed = true;
  } else if (kind == "undirected") {
    g.directed = false;
  } else {
    throw std::invalid_argument("graph: direction must be directed|undirected");
  }
  g.edges.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(is >> g.edges[i].tail >> g.edges[i].head >> g.edges[i].weight)) {
      throw std::invalid_argument("graph: malformed edge line");
    }
  }
  validate_graph(g);
  return g;
}

}  // namespace pardg
