#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pardg/batch.hpp"
#include "pardg/types.hpp"

namespace pardg {

struct SolverConfig {
  double epsilon = 0.1;
  double m = 1.0;              // guess for the optimal value
  int line_search_depth = 4;   // refinement rounds after the two probes
  int max_iterations = 0;      // 0 -> ceil(40 ln(1/eps) / eps)
};

inline int default_max_iterations(double epsilon) {
  return static_cast<int>(std::ceil(40.0 * std::log(1.0 / epsilon) / epsilon));
}

inline void validate_solver_config(const SolverConfig& c) {
  require(c.epsilon > 0.0 && c.epsilon <= 0.25,
          "solver: epsilon must lie in (0, 0.25]");
  require(c.m > 0.0 && std::isfinite(c.m), "solver: M must be positive");
  require(c.line_search_depth >= 1, "solver: line_search_depth must be >= 1");
}

/// Partition of the open coordinates (x_i < y_i) by gradient signs. `active`
/// holds the coordinates still updated fractionally; the others collapse to
/// one endpoint of their interval.
struct Classification {
  IndexSet active;
  IndexSet to_raise;  // grad_x > 0 (and grad_y >= 0): x_i rises to y_i
  IndexSet to_lower;  // grad_x <= 0: y_i drops to x_i
};

inline Classification classify(const Gradient& grad_x, const Gradient& grad_y,
                               const Point& x, const Point& y) {
  require(grad_x.size() == x.size() && grad_y.size() == x.size() &&
              y.size() == x.size(),
          "classify: dimension mismatch");
  Classification out;
  for (std::uint32_t i = 0; i < x.size(); ++i) {
    if (!(x[i] < y[i])) continue;
    if (grad_x[i] > 0.0 && grad_y[i] < 0.0) {
      out.active.push_back(i);
    } else if (grad_x[i] <= 0.0) {
      out.to_lower.push_back(i);
    } else {
      out.to_raise.push_back(i);
    }
  }
  return out;
}

inline void collapse(Point& x, Point& y, const IndexSet& to_raise,
                     const IndexSet& to_lower) {
  for (std::uint32_t i : to_raise) x[i] = y[i];
  for (std::uint32_t i : to_lower) y[i] = x[i];
}

/// Joint update direction on the active set: dx_i = g+ / (g+ - g-) in (0,1),
/// dy_i = g- / (g+ - g-) in (-1,0), so dx_i - dy_i = 1 and a step of eta
/// shrinks each active interval by eta.
struct Direction {
  std::vector<double> dx;
  std::vector<double> dy;
};

inline Direction direction(const Gradient& grad_x, const Gradient& grad_y,
                           const IndexSet& active) {
  Direction d{std::vector<double>(grad_x.size(), 0.0),
              std::vector<double>(grad_x.size(), 0.0)};
  for (std::uint32_t i : active) {
    if (!(grad_x[i] > 0.0 && grad_y[i] < 0.0)) {
      throw std::logic_error(
          "direction: active coordinate violates the gradient sign precondition");
    }
    const double denom = grad_x[i] - grad_y[i];
    d.dx[i] = grad_x[i] / denom;
    d.dy[i] = grad_y[i] / denom;
  }
  return d;
}

/// Potential: total gradient gap over the active set. Each term is positive,
/// and the value upper-bounds the gain still available from those coordinates.
inline double potential(const Gradient& grad_x, const Gradient& grad_y,
                        const IndexSet& active) {
  double acc = 0.0;
  for (std::uint32_t i : active) acc += grad_x[i] - grad_y[i];
  return acc;
}

/// While-loop gate <grad f(x) - grad f(y), y - x>; the main loop runs while
/// this is at least eps * M.
inline double stopping_value(const Gradient& grad_x, const Gradient& grad_y,
                             const Point& x, const Point& y) {
  require(grad_x.size() == x.size() && grad_y.size() == x.size() &&
              y.size() == x.size(),
          "stopping_value: dimension mismatch");
  require(leq(x, y), "stopping_value: requires x <= y");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += (grad_x[i] - grad_y[i]) * (y[i] - x[i]);
  }
  return acc;
}

enum class StepKind {
  None,      // empty active set, no fractional step this iteration
  Fallback,  // condition failed already at eps^4 * eta_max; stepped anyway
  Capped,    // condition held at eta_max (feasibility cap binds)
  Interior   // bracketed step: largest tested eta satisfying the condition
};

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::None: return "none";
    case StepKind::Fallback: return "fallback";
    case StepKind::Capped: return "capped";
    case StepKind::Interior: return "interior";
  }
  return "?";
}

namespace detail {

inline Point offset_point(const Point& base, const std::vector<double>& delta,
                          double eta) {
  Point p(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    p[i] = base[i] + eta * delta[i];
  }
  return p;
}

// The realized step at size eta. Active coordinates whose gap the step
// consumes meet exactly (both endpoints land on the same value), so a capped
// step always closes its binding coordinates instead of leaving them open by
// a rounding error.
inline std::pair<Point, Point> stepped_pair(const Point& x, const Point& y,
                                            const Direction& dir,
                                            const IndexSet& active,
                                            double eta) {
  Point x2 = x;
  Point y2 = y;
  for (std::uint32_t i : active) {
    const double gap = y[i] - x[i];
    if (eta >= gap) {
      const double meetpt = x[i] + gap * dir.dx[i];
      x2[i] = meetpt;
      y2[i] = meetpt;
    } else {
      x2[i] = x[i] + eta * dir.dx[i];
      y2[i] = y[i] + eta * dir.dy[i];
      if (y2[i] < x2[i]) y2[i] = x2[i];
    }
  }
  return {std::move(x2), std::move(y2)};
}

inline void check_oracle_value(double v) {
  if (!std::isfinite(v)) {
    throw std::runtime_error("oracle returned a non-finite value");
  }
  if (v < -1e-12) {
    throw std::runtime_error("oracle returned a negative value");
  }
}

struct CandidateEval {
  double eta = 0.0;
  double f_x = 0.0;
  double f_y = 0.0;
  double gain = 0.0;       // realized joint gain at this step
  double predicted = 0.0;  // (1 - eps) times the first-order prediction
  bool pass = false;
};

// Tests the gain condition at several step sizes with a single batch of
// value queries (two per candidate, in candidate order). Candidates are
// evaluated at the realized step, so the cached values match the points the
// solver would actually move to.
template <DrOracle F>
std::vector<CandidateEval> test_step_sizes(
    BatchOracle<F>& oracle, const Point& x, const Point& y, double f_x,
    double f_y, const Direction& dir, const IndexSet& active,
    double predicted_rate, double epsilon, std::span<const double> etas) {
  std::vector<QueryRequest> reqs;
  reqs.reserve(2 * etas.size());
  for (double eta : etas) {
    auto [xs, ys] = stepped_pair(x, y, dir, active, eta);
    reqs.push_back({QueryKind::Value, std::move(xs)});
    reqs.push_back({QueryKind::Value, std::move(ys)});
  }
  auto res = oracle.batch(reqs);
  std::vector<CandidateEval> out(etas.size());
  for (std::size_t k = 0; k < etas.size(); ++k) {
    const double fx2 = res[2 * k].value;
    const double fy2 = res[2 * k + 1].value;
    check_oracle_value(fx2);
    check_oracle_value(fy2);
    const double lhs = (fx2 - f_x) + (fy2 - f_y);
    const double rhs = (1.0 - epsilon) * etas[k] * predicted_rate;
    out[k] = {etas[k], fx2, fy2, lhs, rhs, lhs >= rhs};
  }
  return out;
}

}  // namespace detail

/// True iff f(x + eta dx) - f(x) + f(y + eta dy) - f(y) is at least a
/// (1 - eps) fraction of its first-order prediction. Issues the two value
/// queries in one batch.
template <DrOracle F>
bool line_search_condition(BatchOracle<F>& oracle, const Point& x,
                           const Point& y, double f_x, double f_y,
                           const Direction& dir, const Gradient& grad_x,
                           const Gradient& grad_y, double eta, double epsilon) {
  require(eta >= 0.0, "line_search_condition: eta must be >= 0");
  const double rate = dot(grad_x, dir.dx) + dot(grad_y, dir.dy);
  const QueryRequest reqs[2] = {
      {QueryKind::Value, detail::offset_point(x, dir.dx, eta)},
      {QueryKind::Value, detail::offset_point(y, dir.dy, eta)}};
  auto res = oracle.batch(reqs);
  detail::check_oracle_value(res[0].value);
  detail::check_oracle_value(res[1].value);
  const double lhs = (res[0].value - f_x) + (res[1].value - f_y);
  return lhs >= (1.0 - epsilon) * eta * rate;
}

struct LineSearchResult {
  double eta = 0.0;
  StepKind kind = StepKind::None;
  double f_x_new = 0.0;  // f at x + eta dx, cached from the search batches
  double f_y_new = 0.0;
  double gain = 0.0;       // realized joint gain at the returned step
  double predicted = 0.0;  // (1 - eps) * first-order prediction at that step
};

/// Multi-round bracketing search for the largest feasible step satisfying the
/// gain condition. The feasibility cap is eta_max = min(1, min gap on the
/// active set). One batch probes both eps^4 * eta_max and eta_max; round j of
/// the refinement then tests all powers of (1 - eps^j) inside the current
/// bracket in one batch and keeps the largest tested step that passes.
template <DrOracle F>
LineSearchResult line_search(BatchOracle<F>& oracle, const Point& x,
                             const Point& y, double f_x, double f_y,
                             const Direction& dir, const Gradient& grad_x,
                             const Gradient& grad_y, const IndexSet& active,
                             double epsilon, int depth) {
  require(!active.empty(), "line_search: active set must be non-empty");
  require(depth >= 1, "line_search: depth must be >= 1");

  double eta_max = 1.0;
  for (std::uint32_t i : active) eta_max = std::min(eta_max, y[i] - x[i]);
  const double eps4 = epsilon * epsilon * epsilon * epsilon;
  const double eta_fallback = eps4 * eta_max;
  const double rate = dot(grad_x, dir.dx) + dot(grad_y, dir.dy);

  detail::CandidateEval kept;
  double hi = 0.0;
  {
    const double probes[2] = {eta_fallback, eta_max};
    auto r = detail::test_step_sizes(oracle, x, y, f_x, f_y, dir, active,
                                     rate, epsilon, probes);
    if (!r[0].pass) {
      // Even the tiny probe misses the condition: use it and stop searching.
      return {eta_fallback, StepKind::Fallback, r[0].f_x, r[0].f_y,
              r[0].gain,    r[0].predicted};
    }
    if (r[1].pass) {
      return {eta_max,   StepKind::Capped, r[1].f_x, r[1].f_y,
              r[1].gain, r[1].predicted};
    }
    kept = r[0];
    hi = eta_max;
  }

  double eps_pow = 1.0;
  for (int j = 1; j <= depth; ++j) {
    eps_pow *= epsilon;
    const double factor = 1.0 - eps_pow;
    if (factor >= 1.0 - 1e-15) break;  // grid too fine to matter
    std::vector<double> cands;
    for (double c = hi * factor; c > kept.eta; c *= factor) {
      cands.push_back(c);
      if (cands.size() > 100000) {
        throw std::logic_error("line_search: candidate grid blow-up");
      }
    }
    if (cands.empty()) continue;
    auto r = detail::test_step_sizes(oracle, x, y, f_x, f_y, dir, active,
                                     rate, epsilon, cands);
    std::size_t first_pass = cands.size();
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (r[k].pass) {
        first_pass = k;
        break;
      }
    }
    if (first_pass == cands.size()) {
      hi = cands.back();  // everything failed; shrink from above
    } else {
      kept = r[first_pass];
      if (first_pass > 0) hi = cands[first_pass - 1];
    }
  }
  return {kept.eta,  StepKind::Interior, kept.f_x, kept.f_y,
          kept.gain, kept.predicted};
}

struct IterationRecord {
  int t = 0;
  double phi_pre = 0.0;   // potential over the sign set before the collapse
  double phi = 0.0;       // potential over the active set after the collapse
  double stopping_value = 0.0;     // gate value at the start of the iteration
  double stopping_on_active = 0.0; // same inner product restricted to S
  double eta = 0.0;
  StepKind step_kind = StepKind::None;
  std::size_t s_size = 0;
  double gain = 0.0;       // line-search gain realized at the chosen step
  double predicted = 0.0;  // (1 - eps) * first-order prediction at that step
  double f_x = 0.0;  // values after the iteration's update
  double f_y = 0.0;
  // <grad f(x_{t+1}) - grad f(y_{t+1}), 1_S> over this iteration's S, filled
  // once the next gradient batch is available; NaN on a truncated tail.
  double phi_next_on_active = std::numeric_limits<double>::quiet_NaN();
  OracleStats stats;  // cumulative counters at the end of the iteration
  Point x_after;
  Point y_after;
  IndexSet active_set;
};

struct RunTrace {
  SolverConfig config;
  Point x0;
  Point y0;
  std::vector<IterationRecord> iterations;
  Point solution;
  double solution_value = 0.0;
  bool truncated = false;
  OracleStats stats;
};

/// Parallel double greedy over the unit box. Maintains a shrinking box
/// [x, y]; every iteration refreshes both gradients, collapses coordinates
/// whose gradients already agree on a side, and moves the rest jointly by a
/// line-searched step. Returns the better of the two meeting points together
/// with the full per-iteration trace.
template <DrOracle F>
RunTrace parallel_double_greedy(BatchOracle<F>& oracle, SolverConfig config) {
  validate_solver_config(config);
  if (config.max_iterations <= 0) {
    config.max_iterations = default_max_iterations(config.epsilon);
  }
  const std::size_t n = oracle.fn().dimension();
  const double eps = config.epsilon;

  RunTrace trace;
  trace.config = config;
  Point x(n, eps);
  Point y(n, 1.0 - eps);
  trace.x0 = x;
  trace.y0 = y;

  double f_x = 0.0;
  double f_y = 0.0;
  bool have_values = false;
  Gradient grad_x;
  Gradient grad_y;

  while (true) {
    std::vector<QueryRequest> reqs;
    reqs.push_back({QueryKind::Gradient, x});
    reqs.push_back({QueryKind::Gradient, y});
    if (!have_values) {
      reqs.push_back({QueryKind::Value, x});
      reqs.push_back({QueryKind::Value, y});
    }
    auto res = oracle.batch(reqs);
    grad_x = std::move(res[0].gradient);
    grad_y = std::move(res[1].gradient);
    if (!have_values) {
      f_x = res[2].value;
      f_y = res[3].value;
      detail::check_oracle_value(f_x);
      detail::check_oracle_value(f_y);
      have_values = true;
    }

    if (!trace.iterations.empty()) {
      IterationRecord& prev = trace.iterations.back();
      double acc = 0.0;
      for (std::uint32_t i : prev.active_set) acc += grad_x[i] - grad_y[i];
      prev.phi_next_on_active = acc;
    }

    const double sv = stopping_value(grad_x, grad_y, x, y);
    if (sv < eps * config.m) break;
    if (static_cast<int>(trace.iterations.size()) >= config.max_iterations) {
      trace.truncated = true;
      break;
    }

    IterationRecord rec;
    rec.t = static_cast<int>(trace.iterations.size());
    rec.stopping_value = sv;

    Classification pre = classify(grad_x, grad_y, x, y);
    rec.phi_pre = potential(grad_x, grad_y, pre.active);
    collapse(x, y, pre.to_raise, pre.to_lower);

    // Refresh gradients and values at the collapsed pair so the sign
    // preconditions of direction() hold for the set we actually step on.
    {
      std::vector<QueryRequest> reqs2;
      reqs2.push_back({QueryKind::Gradient, x});
      reqs2.push_back({QueryKind::Gradient, y});
      reqs2.push_back({QueryKind::Value, x});
      reqs2.push_back({QueryKind::Value, y});
      auto res2 = oracle.batch(reqs2);
      grad_x = std::move(res2[0].gradient);
      grad_y = std::move(res2[1].gradient);
      f_x = res2[2].value;
      f_y = res2[3].value;
      detail::check_oracle_value(f_x);
      detail::check_oracle_value(f_y);
    }

    Classification post = classify(grad_x, grad_y, x, y);
    rec.active_set = post.active;
    rec.s_size = post.active.size();
    rec.phi = potential(grad_x, grad_y, post.active);
    {
      double acc = 0.0;
      for (std::uint32_t i : post.active) {
        acc += (grad_x[i] - grad_y[i]) * (y[i] - x[i]);
      }
      rec.stopping_on_active = acc;
    }

    if (!post.active.empty()) {
      Direction dir = direction(grad_x, grad_y, post.active);
      LineSearchResult ls =
          line_search(oracle, x, y, f_x, f_y, dir, grad_x, grad_y, post.active,
                      eps, config.line_search_depth);
      rec.eta = ls.eta;
      rec.step_kind = ls.kind;
      rec.gain = ls.gain;
      rec.predicted = ls.predicted;
      auto [x_new, y_new] = detail::stepped_pair(x, y, dir, post.active, ls.eta);
      x = std::move(x_new);
      y = std::move(y_new);
      f_x = ls.f_x_new;  // cached at exactly this pair by the search batches
      f_y = ls.f_y_new;
    }

    rec.f_x = f_x;
    rec.f_y = f_y;
    rec.stats = oracle.stats();
    rec.x_after = x;
    rec.y_after = y;
    trace.iterations.push_back(std::move(rec));
  }

  trace.stats = oracle.stats();
  if (f_x >= f_y) {
    trace.solution = x;
    trace.solution_value = f_x;
  } else {
    trace.solution = y;
    trace.solution_value = f_y;
  }
  return trace;
}

struct GuessResult {
  Point solution;
  double value = 0.0;
  std::vector<RunTrace> traces;  // one per guess, in guess order
};

/// Runs the solver for M = L (1+eps)^j, j = 0..ceil(log_{1+eps}(U/L)), and
/// keeps the best solution (first guess wins ties).
template <DrOracle F>
GuessResult guess_m_and_solve(const F& fn, double epsilon, double lower,
                              double upper, int line_search_depth = 4) {
  require(lower > 0.0 && std::isfinite(lower),
          "guess_m_and_solve: L must be positive");
  require(upper >= lower && std::isfinite(upper),
          "guess_m_and_solve: need L <= U");
  const int guesses =
      1 + static_cast<int>(
              std::ceil(std::log(upper / lower) / std::log1p(epsilon)));
  GuessResult out;
  out.value = -std::numeric_limits<double>::infinity();
  double m = lower;
  for (int j = 0; j < guesses; ++j) {
    BatchOracle<F> oracle(fn);
    SolverConfig config;
    config.epsilon = epsilon;
    config.m = m;
    config.line_search_depth = line_search_depth;
    RunTrace trace = parallel_double_greedy(oracle, config);
    if (trace.solution_value > out.value) {
      out.value = trace.solution_value;
      out.solution = trace.solution;
    }
    out.traces.push_back(std::move(trace));
    m *= 1.0 + epsilon;
  }
  return out;
}

/// Default bounds: L = max f over {0, 1, eps 1, (1-eps) 1}, U = n L.
template <DrOracle F>
GuessResult guess_m_and_solve(const F& fn, double epsilon,
                              int line_search_depth = 4) {
  const std::size_t n = fn.dimension();
  const Point probes[4] = {Point(n, 0.0), Point(n, 1.0), Point(n, epsilon),
                           Point(n, 1.0 - epsilon)};
  double lower = 0.0;
  for (const Point& p : probes) lower = std::max(lower, fn.value(p));
  require(lower > 0.0, "guess_m_and_solve: default lower bound is not positive");
  return guess_m_and_solve(fn, epsilon, lower, static_cast<double>(n) * lower,
                           line_search_depth);
}

}  // namespace pardg
