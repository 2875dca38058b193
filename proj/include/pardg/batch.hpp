#pragma once

#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "pardg/types.hpp"

namespace pardg {

template <typename F>
concept DrOracle = requires(const F& f, const Point& x) {
  { f.dimension() } -> std::convertible_to<std::size_t>;
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<Gradient>;
};

enum class QueryKind { Value, Gradient };

struct QueryRequest {
  QueryKind kind = QueryKind::Value;
  Point point;
};

struct QueryResult {
  QueryKind kind = QueryKind::Value;
  double value = 0.0;
  Gradient gradient;
};

/// Query counters. One adaptive round is one batch of simultaneous queries;
/// adaptivity is the number of such sequential batches.
struct OracleStats {
  std::uint64_t value_queries = 0;
  std::uint64_t gradient_queries = 0;
  std::uint64_t adaptive_rounds = 0;
};

/// Wraps an immutable oracle and serializes all queries through batches. Each
/// batch costs exactly one adaptive round regardless of its size; results come
/// back in request order and are evaluated in request order, so identical
/// batches yield bitwise-identical results.
template <DrOracle F>
class BatchOracle {
 public:
  explicit BatchOracle(const F& f) : fn_(&f) {}

  std::vector<QueryResult> batch(std::span<const QueryRequest> requests) {
    require(!requests.empty(), "batch_query: empty request list");
    // Validate every point up front: one bad request fails the whole batch
    // before anything is evaluated or counted.
    for (const QueryRequest& r : requests) {
      require(r.point.size() == fn_->dimension(),
              "batch_query: point dimension mismatch");
      for (double v : r.point) {
        require(std::isfinite(v) && v >= 0.0,
                "batch_query: point entries must be finite and >= 0");
      }
    }
    std::vector<QueryResult> out;
    out.reserve(requests.size());
    std::uint64_t nv = 0;
    std::uint64_t ng = 0;
    for (const QueryRequest& r : requests) {
      QueryResult res;
      res.kind = r.kind;
      if (r.kind == QueryKind::Value) {
        res.value = fn_->value(r.point);
        ++nv;
      } else {
        res.gradient = fn_->gradient(r.point);
        ++ng;
      }
      out.push_back(std::move(res));
    }
    stats_.value_queries += nv;
    stats_.gradient_queries += ng;
    stats_.adaptive_rounds += 1;
    return out;
  }

  std::vector<QueryResult> batch(std::initializer_list<QueryRequest> requests) {
    return batch(std::span<const QueryRequest>(requests.begin(), requests.size()));
  }

  const F& fn() const { return *fn_; }
  const OracleStats& stats() const { return stats_; }

 private:
  const F* fn_;
  OracleStats stats_;
};

}  // namespace pardg
