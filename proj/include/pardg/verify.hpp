#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "pardg/dynamics.hpp"
#include "pardg/sampling.hpp"
#include "pardg/solver.hpp"
#include "pardg/types.hpp"

namespace pardg {

// Slack constants for the property checkers, sized to dominate accumulated
// 64-bit rounding plus the approximate-line-search loss.
namespace check_tol {
inline constexpr double kDrSlack = 1e-12;
inline constexpr double kPropertySlack = 1e-9;
inline constexpr double kFdStep = 1e-6;
inline constexpr double kFdRelTol = 1e-6;
inline constexpr double kFdAbsTol = 1e-8;
inline constexpr double kDecayFactor = 0.25;     // 1 - eps/4 per interior step
inline constexpr double kDecaySlack = 1e-9;
inline constexpr double kPhiStartFactor = 2.0;   // phi0 <= 2 M / eps
inline constexpr double kIterationConstant = 40.0;
inline constexpr int kRoundsPerIteration = 4;    // depth + this, per iteration
}  // namespace check_tol

struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_violation = 0.0;  // largest violation seen (negative = margin)
  std::uint64_t samples = 0;
  std::string details;           // arg-worst sample for reproduction
};

namespace detail {

inline std::string worst_sample_note(std::int64_t idx) {
  if (idx < 0) return "no violation recorded";
  std::ostringstream os;
  os << "worst sample index " << idx;
  return os.str();
}

}  // namespace detail

/// Gradient antitonicity: for random pairs x <= y the gradient at x must
/// dominate the gradient at y coordinate-wise.
template <DrOracle F>
CheckReport check_dr(const F& f, std::size_t n, int samples,
                     std::uint64_t seed) {
  require(samples >= 1, "check_dr: samples must be >= 1");
  require(n == f.dimension(), "check_dr: dimension mismatch");
  CounterRng rng(seed, "check_dr");
  CheckReport rep{"dr_monotonicity", false, -std::numeric_limits<double>::infinity(),
                  static_cast<std::uint64_t>(samples), ""};
  std::int64_t worst_idx = -1;
  for (int s = 0; s < samples; ++s) {
    auto [x, y] = random_box_pair(n, rng);
    const Gradient gx = f.gradient(x);
    const Gradient gy = f.gradient(y);
    for (std::size_t i = 0; i < n; ++i) {
      const double viol = gy[i] - gx[i];
      if (viol > rep.worst_violation) {
        rep.worst_violation = viol;
        worst_idx = s;
      }
    }
  }
  rep.passed = rep.worst_violation <= check_tol::kDrSlack;
  rep.details = detail::worst_sample_note(rep.passed ? -1 : worst_idx);
  return rep;
}

/// Central finite differences against the analytic gradient at interior
/// points. worst_violation is the excess over the allowance
/// max(abs_tol, rel_tol * |analytic|).
template <DrOracle F>
CheckReport check_gradient_fd(const F& f, int samples, std::uint64_t seed) {
  require(samples >= 1, "check_gradient_fd: samples must be >= 1");
  CounterRng rng(seed, "check_gradient_fd");
  const std::size_t n = f.dimension();
  const double h = check_tol::kFdStep;
  CheckReport rep{"gradient_finite_difference", false,
                  -std::numeric_limits<double>::infinity(),
                  static_cast<std::uint64_t>(samples), ""};
  std::int64_t worst_idx = -1;
  for (int s = 0; s < samples; ++s) {
    Point x = random_box_point(n, rng);
    for (double& v : x) v = 0.01 + 0.98 * v;  // keep FD stencils inside
    const Gradient g = f.gradient(x);
    for (std::size_t i = 0; i < n; ++i) {
      Point hi = x;
      Point lo = x;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (f.value(hi) - f.value(lo)) / (2.0 * h);
      const double allowed =
          std::max(check_tol::kFdAbsTol, check_tol::kFdRelTol * std::abs(g[i]));
      const double viol = std::abs(g[i] - fd) - allowed;
      if (viol > rep.worst_violation) {
        rep.worst_violation = viol;
        worst_idx = s;
      }
    }
  }
  rep.passed = rep.worst_violation <= 0.0;
  rep.details = detail::worst_sample_note(rep.passed ? -1 : worst_idx);
  return rep;
}

/// f(x* v x) >= (1 - ||x||_inf) f(x*) for random x.
template <DrOracle F>
CheckReport check_x_or_opt(const F& f, const Point& x_star, int trials,
                           std::uint64_t seed) {
  require(trials >= 1, "check_x_or_opt: trials must be >= 1");
  validate_box_point(x_star);
  CounterRng rng(seed, "check_x_or_opt");
  const double f_star = f.value(x_star);
  CheckReport rep{"x_or_opt", false, -std::numeric_limits<double>::infinity(),
                  static_cast<std::uint64_t>(trials), ""};
  std::int64_t worst_idx = -1;
  for (int s = 0; s < trials; ++s) {
    const Point x = random_box_point(x_star.size(), rng);
    const double lhs = f.value(join(x_star, x));
    const double rhs = (1.0 - max_norm(x)) * f_star;
    const double viol = rhs - lhs;
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      worst_idx = s;
    }
  }
  rep.passed = rep.worst_violation <= check_tol::kPropertySlack;
  rep.details = detail::worst_sample_note(rep.passed ? -1 : worst_idx);
  return rep;
}

/// <grad f(x), y-x> >= f(y) - f(x) >= <grad f(y), y-x> for random x <= y.
template <DrOracle F>
CheckReport check_concavity_bounds(const F& f, int trials, std::uint64_t seed) {
  require(trials >= 1, "check_concavity_bounds: trials must be >= 1");
  CounterRng rng(seed, "check_concavity_bounds");
  const std::size_t n = f.dimension();
  CheckReport rep{"concavity_bounds", false,
                  -std::numeric_limits<double>::infinity(),
                  static_cast<std::uint64_t>(trials), ""};
  std::int64_t worst_idx = -1;
  for (int s = 0; s < trials; ++s) {
    auto [x, y] = random_box_pair(n, rng);
    Point diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = y[i] - x[i];
    const double gap = f.value(y) - f.value(x);
    const double upper = dot(f.gradient(x), diff);
    const double lower = dot(f.gradient(y), diff);
    const double viol = std::max(gap - upper, lower - gap);
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      worst_idx = s;
    }
  }
  rep.passed = rep.worst_violation <= check_tol::kPropertySlack;
  rep.details = detail::worst_sample_note(rep.passed ? -1 : worst_idx);
  return rep;
}

/// Telescoping invariant of the solver run: per iteration,
/// (1/2)(df(x) + df(y)) + (1-eps) df(p) >= -eps^2 M, with p the projection of
/// x* onto the current box.
template <DrOracle F>
CheckReport check_disc_invariant(const RunTrace& trace, const F& f,
                                 const Point& x_star, double epsilon) {
  validate_box_point(x_star);
  CheckReport rep{"disc_invariant", true,
                  -std::numeric_limits<double>::infinity(),
                  trace.iterations.size(), ""};
  if (trace.iterations.empty()) {
    rep.worst_violation = 0.0;
    rep.details = "vacuous: empty trace";
    return rep;
  }
  for (const IterationRecord& rec : trace.iterations) {
    require(!rec.x_after.empty() && !rec.y_after.empty(),
            "check_disc_invariant: trace lacks iterates");
  }
  const double slack = epsilon * epsilon * trace.config.m;
  const Point* px = &trace.x0;
  const Point* py = &trace.y0;
  Point p_prev = project_to_box(x_star, *px, *py);
  double fx_prev = f.value(*px);
  double fy_prev = f.value(*py);
  double fp_prev = f.value(p_prev);
  std::int64_t worst_idx = -1;
  for (std::size_t t = 0; t < trace.iterations.size(); ++t) {
    const IterationRecord& rec = trace.iterations[t];
    const Point p = project_to_box(x_star, rec.x_after, rec.y_after);
    const double fx = f.value(rec.x_after);
    const double fy = f.value(rec.y_after);
    const double fp = f.value(p);
    const double quantity = 0.5 * ((fx - fx_prev) + (fy - fy_prev)) +
                            (1.0 - epsilon) * (fp - fp_prev);
    const double viol = -quantity;
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      worst_idx = static_cast<std::int64_t>(t);
    }
    fx_prev = fx;
    fy_prev = fy;
    fp_prev = fp;
  }
  rep.passed = rep.worst_violation <= slack;
  rep.details = detail::worst_sample_note(rep.passed ? -1 : worst_idx);
  return rep;
}

/// Potential bookkeeping of a finished run: geometric decay on interior
/// steps, the iteration bound, the bounded starting potential, the stopping
/// gate on every recorded iteration, and the potential dominating its
/// gap-weighted restriction.
inline CheckReport check_potential_decay(const RunTrace& trace,
                                         double epsilon) {
  CheckReport rep{"potential_decay", true,
                  -std::numeric_limits<double>::infinity(),
                  trace.iterations.size(), ""};
  std::ostringstream details;
  double worst = -std::numeric_limits<double>::infinity();

  // (a) decay factor on interior steps, judged against the next potential
  // restricted to this iteration's active set
  for (const IterationRecord& rec : trace.iterations) {
    if (rec.step_kind != StepKind::Interior) continue;
    if (std::isnan(rec.phi_next_on_active)) continue;
    const double viol = rec.phi_next_on_active -
                        (1.0 - epsilon * check_tol::kDecayFactor) * rec.phi -
                        check_tol::kDecaySlack;
    worst = std::max(worst, viol);
    if (viol > 0.0) details << "decay violated at t=" << rec.t << "; ";
  }
  // (b) iteration budget
  const double iter_bound =
      check_tol::kIterationConstant * std::log(1.0 / epsilon) / epsilon;
  const double iter_excess =
      static_cast<double>(trace.iterations.size()) - iter_bound;
  worst = std::max(worst, iter_excess);
  if (iter_excess > 0.0) details << "iteration budget exceeded; ";
  // (c) starting potential
  if (!trace.iterations.empty()) {
    const double phi0_excess =
        trace.iterations.front().phi_pre -
        check_tol::kPhiStartFactor * trace.config.m / epsilon;
    worst = std::max(worst, phi0_excess);
    if (phi0_excess > 0.0) details << "phi0 above 2M/eps; ";
  }
  // (d) every recorded iteration passed the while gate, and the potential
  // dominates its restriction by the open gaps
  for (const IterationRecord& rec : trace.iterations) {
    const double gate_viol = epsilon * trace.config.m - rec.stopping_value;
    worst = std::max(worst, gate_viol);
    if (gate_viol > 0.0) details << "gate violated at t=" << rec.t << "; ";
    const double dom_viol =
        rec.stopping_on_active - rec.phi - check_tol::kDecaySlack;
    worst = std::max(worst, dom_viol);
    if (dom_viol > 0.0) details << "phi below restricted gate at t=" << rec.t << "; ";
  }

  if (trace.iterations.empty()) worst = 0.0;
  rep.worst_violation = worst;
  rep.passed = worst <= 0.0;
  rep.details = details.str().empty() ? "all sub-checks within slack"
                                      : details.str();
  return rep;
}

/// Round accounting: adaptive rounds within (depth + 4) per iteration (a run
/// with no iterations still pays one gate check), iterations within
/// 40 ln(1/eps) / eps.
inline CheckReport check_round_budget(const OracleStats& stats, double epsilon,
                                      std::size_t iterations,
                                      int line_search_depth) {
  CheckReport rep{"round_budget", false, 0.0, iterations, ""};
  const double round_bound = std::max<double>(
      1.0, static_cast<double>(line_search_depth + check_tol::kRoundsPerIteration) *
               static_cast<double>(iterations));
  const double round_excess =
      static_cast<double>(stats.adaptive_rounds) - round_bound;
  const double iter_bound =
      check_tol::kIterationConstant * std::log(1.0 / epsilon) / epsilon;
  const double iter_excess = static_cast<double>(iterations) - iter_bound;
  rep.worst_violation = std::max(round_excess, iter_excess);
  rep.passed = rep.worst_violation <= 0.0;
  std::ostringstream os;
  os << "rounds " << stats.adaptive_rounds << " of " << round_bound
     << ", iterations " << iterations << " of " << iter_bound;
  rep.details = os.str();
  return rep;
}

}  // namespace pardg
