#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "pardg/batch.hpp"
#include "pardg/prng.hpp"
#include "pardg/sampling.hpp"
#include "pardg/types.hpp"

namespace pardg {

enum class DynamicsRule { GradientRatio, GradientSplit };

struct DynamicsConfig {
  DynamicsRule rule = DynamicsRule::GradientRatio;
  double step_size = 1e-3;  // h, in (0, 0.01]
  double alpha = 1.0;
  double invariant_tolerance = 0.0;  // <= 0: use 10 h n Ghat^2 (sampled)
  // The split rule's companion proof works with ydot = grad f(y)^-. Setting
  // this flag uses ydot = grad f(x)^- instead, exposed for comparison only;
  // no invariant is certified for it.
  bool split_literal_variant = false;
};

inline void validate_dynamics_config(const DynamicsConfig& c) {
  require(c.step_size > 0.0 && c.step_size <= 0.01,
          "dynamics: step size must lie in (0, 0.01]");
  require(c.alpha > 0.0, "dynamics: alpha must be positive");
}

struct TrajectorySample {
  double t = 0.0;
  Point x;
  Point y;
  Point p;  // projection of x* onto [x, y]
  double f_x = 0.0;
  double f_y = 0.0;
  double f_p = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double tolerance = 0.0;  // per-step residual tolerance used by the certifier
  double alpha = 1.0;
  bool met = false;        // x == y at the end
};

/// Coordinate-wise median (x* ^ y) v x: the projection of x* onto the box
/// [x, y].
inline Point project_to_box(const Point& x_star, const Point& x,
                            const Point& y) {
  require(x_star.size() == x.size() && y.size() == x.size(),
          "project_to_box: dimension mismatch");
  require(leq(x, y), "project_to_box: requires x <= y");
  Point p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = std::max(x[i], std::min(x_star[i], y[i]));
  }
  return p;
}

/// Largest sampled |grad_i f| over random box points; scales the default
/// invariant tolerance.
template <DrOracle F>
double estimate_gradient_bound(const F& f, int samples = 100,
                               std::uint64_t seed = 0) {
  CounterRng rng(seed, "gradient_bound");
  double ghat = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point x = random_box_point(f.dimension(), rng);
    ghat = std::max(ghat, max_norm(f.gradient(x)));
  }
  return ghat;
}

struct StepVelocities {
  std::vector<double> vx;
  std::vector<double> vy;
};

/// Velocities of the ratio rule: on coordinates with grad f(x) > 0 >
/// grad f(y), x and y close their gap at unit combined speed, split in
/// proportion to the gradients; all other coordinates stand still.
inline StepVelocities ratio_velocities(const Gradient& grad_x,
                                       const Gradient& grad_y) {
  const std::size_t n = grad_x.size();
  StepVelocities v{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (grad_x[i] > 0.0 && grad_y[i] < 0.0) {
      const double denom = grad_x[i] - grad_y[i];
      v.vx[i] = grad_x[i] / denom;
      v.vy[i] = grad_y[i] / denom;
    }
  }
  return v;
}

/// Velocities of the split rule: xdot = grad f(x)^+, ydot = grad f(y)^-
/// (or grad f(x)^- under the literal variant flag).
inline StepVelocities split_velocities(const Gradient& grad_x,
                                       const Gradient& grad_y,
                                       bool literal_variant = false) {
  const std::size_t n = grad_x.size();
  StepVelocities v{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    v.vx[i] = std::max(grad_x[i], 0.0);
    v.vy[i] = std::min(literal_variant ? grad_x[i] : grad_y[i], 0.0);
  }
  return v;
}

namespace detail {

// Euler step with per-coordinate clipping: a coordinate whose gap would be
// overshot moves exactly to the meeting point, so x' <= y' always holds.
inline void euler_move(Point& x, Point& y, const StepVelocities& v, double h) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] < y[i])) continue;
    if (v.vx[i] == 0.0 && v.vy[i] == 0.0) continue;
    const double closing = v.vx[i] - v.vy[i];
    if (closing > 0.0 && (y[i] - x[i]) <= h * closing) {
      const double tau = (y[i] - x[i]) / closing;
      const double meetpt = x[i] + tau * v.vx[i];
      x[i] = meetpt;
      y[i] = meetpt;
    } else {
      x[i] = x[i] + h * v.vx[i];
      y[i] = y[i] + h * v.vy[i];
      if (y[i] < x[i]) y[i] = x[i];
    }
  }
}

}  // namespace detail

inline std::pair<Point, Point> step_gradient_ratio(const Point& x,
                                                   const Point& y,
                                                   const Gradient& grad_x,
                                                   const Gradient& grad_y,
                                                   double h) {
  require(leq(x, y), "step_gradient_ratio: requires x <= y");
  Point x2 = x;
  Point y2 = y;
  detail::euler_move(x2, y2, ratio_velocities(grad_x, grad_y), h);
  return {std::move(x2), std::move(y2)};
}

inline std::pair<Point, Point> step_gradient_split(
    const Point& x, const Point& y, const Gradient& grad_x,
    const Gradient& grad_y, double h, bool literal_variant = false) {
  require(leq(x, y), "step_gradient_split: requires x <= y");
  Point x2 = x;
  Point y2 = y;
  detail::euler_move(x2, y2,
                     split_velocities(grad_x, grad_y, literal_variant), h);
  return {std::move(x2), std::move(y2)};
}

/// Integrated form of the per-step invariant: (1/2)(df(x) + df(y)) +
/// alpha * df(p) between consecutive samples. The certifier requires this to
/// stay above -tolerance.
inline double discrete_invariant_residual(const TrajectorySample& prev,
                                          const TrajectorySample& next,
                                          double alpha) {
  return 0.5 * ((next.f_x - prev.f_x) + (next.f_y - prev.f_y)) +
         alpha * (next.f_p - prev.f_p);
}

struct InvariantCertificate {
  bool ok = false;
  double min_residual = 0.0;
  std::size_t worst_step = 0;  // index of the sample ending the worst step
  double cumulative = 0.0;
  double tolerance = 0.0;
};

inline InvariantCertificate certify_invariant(const Trajectory& traj,
                                              double alpha) {
  InvariantCertificate cert;
  cert.tolerance = traj.tolerance;
  cert.min_residual = 0.0;
  for (std::size_t s = 1; s < traj.samples.size(); ++s) {
    const double r =
        discrete_invariant_residual(traj.samples[s - 1], traj.samples[s], alpha);
    cert.cumulative += r;
    if (r < cert.min_residual) {
      cert.min_residual = r;
      cert.worst_step = s;
    }
  }
  cert.ok = cert.min_residual >= -traj.tolerance;
  return cert;
}

/// Forward-Euler integration of the chosen rule from x = 0, y = 1, tracking
/// the projected optimum p. The ratio rule runs until the box closes (frozen
/// coordinates are collapsed by gradient sign once their velocity has been
/// zero for two consecutive steps); the split rule runs until its velocities
/// vanish on the open coordinates.
template <DrOracle F>
Trajectory integrate(const F& f, const Point& x_star,
                     const DynamicsConfig& config) {
  validate_dynamics_config(config);
  const std::size_t n = f.dimension();
  require(x_star.size() == n, "integrate: x_star dimension mismatch");
  validate_box_point(x_star);

  const double h = config.step_size;
  Trajectory traj;
  traj.alpha = config.alpha;
  if (config.invariant_tolerance > 0.0) {
    traj.tolerance = config.invariant_tolerance;
  } else {
    const double ghat = estimate_gradient_bound(f);
    traj.tolerance = 10.0 * h * static_cast<double>(n) * ghat * ghat;
  }

  Point x(n, 0.0);
  Point y(n, 1.0);
  std::vector<int> zero_streak(n, 0);

  auto record = [&](double t) {
    const Point p = project_to_box(x_star, x, y);
    traj.samples.push_back(
        {t, x, y, p, f.value(x), f.value(y), f.value(p)});
  };
  auto all_met = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] < y[i]) return false;
    }
    return true;
  };

  record(0.0);
  const std::size_t cap =
      config.rule == DynamicsRule::GradientRatio
          ? static_cast<std::size_t>(std::ceil(1.0 / h)) + 2 * n + 8
          : static_cast<std::size_t>(std::ceil(32.0 / h));

  for (std::size_t step = 1; step <= cap; ++step) {
    if (all_met()) break;
    const Gradient grad_x = f.gradient(x);
    const Gradient grad_y = f.gradient(y);
    StepVelocities vel =
        config.rule == DynamicsRule::GradientRatio
            ? ratio_velocities(grad_x, grad_y)
            : split_velocities(grad_x, grad_y, config.split_literal_variant);

    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] < y[i]) {
        vmax = std::max(vmax, std::max(std::abs(vel.vx[i]), std::abs(vel.vy[i])));
      }
    }
    if (config.rule == DynamicsRule::GradientSplit && vmax <= 1e-12) break;

    if (config.rule == DynamicsRule::GradientRatio) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] < y[i])) continue;
        if (vel.vx[i] == 0.0 && vel.vy[i] == 0.0) {
          if (++zero_streak[i] >= 2) {
            // Frozen coordinate: fix it to one side by gradient sign so the
            // trajectory still reaches a meeting point.
            if (grad_x[i] <= 0.0) {
              y[i] = x[i];
            } else {
              x[i] = y[i];
            }
            zero_streak[i] = 0;
          }
        } else {
          zero_streak[i] = 0;
        }
      }
    }

    detail::euler_move(x, y, vel, h);
    record(h * static_cast<double>(step));
  }

  traj.met = all_met();
  return traj;
}

}  // namespace pardg
