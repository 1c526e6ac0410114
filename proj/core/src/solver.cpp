#include "secrelay/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "secrelay/projection.hpp"
#include "secrelay/rng.hpp"

namespace secrelay {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int inner_budget(const InnerBudget& b, Rng& rng) {
  switch (b.schedule) {
    case InnerBudget::Schedule::kFixed:
      return b.L;
    case InnerBudget::Schedule::kUniform:
      return rng.uniform_int(1, b.L_max);
    case InnerBudget::Schedule::kUntilConverged:
      return b.max_inner;
  }
  return b.L;
}

void check_feasible(const IteratePoint& x, const DerivedConstants& dc, double P_R) {
  if (x.dim() != dc.dim() || x.Q.rows() != dc.dim()) throw InfeasiblePoint("initial point has wrong dimension");
  if (!is_hermitian(x.W, 1e-8) || !is_hermitian(x.Q, 1e-8)) throw InfeasiblePoint("initial point is not Hermitian");
  if (!within_budget(x, P_R)) throw InfeasiblePoint("initial point violates the PSD or power constraints");
}

// Best point on a uniform grid of the segment, never worse than the Armijo point.
StepResult limited_minimization(const IteratePoint& x, const Surrogate& s, const HermitianPair& grad,
                                const HermitianPair& d, const SolverOptions& opts) {
  StepResult best = armijo_step(x, s, grad, d, opts.armijo);
  if (best.stalled) return best;
  const double top = opts.armijo.scale_by_gradient ? opts.armijo.initial_step / (1.0 + grad.norm())
                                                   : opts.armijo.initial_step;
  for (int i = 1; i <= opts.grid_size; ++i) {
    const double a = top * i / opts.grid_size;
    IteratePoint y = x + a * d;
    const double v = s.value(y);
    if (v > best.value) {
      best.value = v;
      best.x_next = std::move(y);
    }
  }
  return best;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(P_R > 0.0)) throw ConfigError("P_R must be positive");
  if (!(armijo.sigma > 0.0 && armijo.sigma < 1.0)) throw ConfigError("Armijo sigma must lie in (0, 1)");
  if (!(armijo.beta > 0.0 && armijo.beta < 1.0)) throw ConfigError("Armijo beta must lie in (0, 1)");
  // Trial points are x + a d with d the unit-step gradient mapping: feasible only for a <= 1.
  if (!(armijo.initial_step > 0.0 && armijo.initial_step <= 1.0)) throw ConfigError("initial step must lie in (0, 1]");
  if (armijo.max_backtracks < 1) throw ConfigError("max_backtracks must be >= 1");
  if (!(outer_tol > 0.0) || !(stationarity_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (max_outer < 0) throw ConfigError("max_outer must be >= 0");
  if (inner.L < 1 || inner.L_max < 1 || inner.max_inner < 1) throw ConfigError("inner budgets must be >= 1");
  if (!(inner.tol > 0.0)) throw ConfigError("inner tolerance must be positive");
  if (grid_size < 1) throw ConfigError("grid_size must be >= 1");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kStationary:
      return "stationary";
    case StopReason::kSurrogateTol:
      return "surrogate_tol";
    case StopReason::kMaxOuter:
      return "max_outer";
    case StopReason::kStalled:
      return "stalled";
  }
  return "unknown";
}

double SolveTrace::min_progress_ratio() const {
  if (iterations.empty()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& it : iterations) m = std::min(m, it.progress_ratio);
  return m;
}

GradientMapping gradient_mapping(const IteratePoint& x, const HermitianPair& grad, const Projector& project) {
  GradientMapping gm;
  gm.direction = project(x + grad) - x;
  gm.norm = gm.direction.norm();
  return gm;
}

GradientMapping gradient_mapping(const IteratePoint& x, const Surrogate& s, const Projector& project) {
  return gradient_mapping(x, s.gradient(x), project);
}

GradientMapping gradient_mapping(const IteratePoint& x, const IteratePoint& anchor, const DerivedConstants& dc,
                                 double P_R) {
  const Surrogate s(anchor, dc);
  return gradient_mapping(x, s, [P_R](const HermitianPair& m) { return project_feasible(m, P_R); });
}

StepResult armijo_step(const IteratePoint& x, const Surrogate& s, const HermitianPair& grad,
                       const HermitianPair& direction, const ArmijoParams& p) {
  StepResult out;
  const double v0 = s.value(x);
  out.value = v0;
  out.x_next = x;
  const double slope = inner(grad, direction);
  if (direction.squared_norm() == 0.0 || !(slope > 0.0)) {
    out.stalled = true;
    return out;
  }
  double a = p.scale_by_gradient ? p.initial_step / (1.0 + grad.norm()) : p.initial_step;
  const double resolution = 64.0 * kEps * std::max(1.0, std::abs(v0));
  for (int m = 0; m <= p.max_backtracks; ++m, a *= p.beta) {
    // Required gain below what phi~ can resolve: nothing further to find along d.
    if (p.sigma * a * slope <= resolution) {
      out.stalled = true;
      return out;
    }
    IteratePoint y = x + a * direction;
    double v;
    try {
      v = s.value(y);
    } catch (const DomainError&) {
      continue;
    }
    if (v - v0 >= p.sigma * a * slope) {
      out.step = a;
      out.value = v;
      out.x_next = std::move(y);
      out.backtracks = m;
      return out;
    }
  }
  throw LineSearchFailure("Armijo backtracking exceeded " + std::to_string(p.max_backtracks) +
                          " reductions (slope " + fmt_g(slope) + ", value " + fmt_g(v0) + ")");
}

StepResult armijo_step(const IteratePoint& x, const IteratePoint& anchor, const DerivedConstants& dc,
                       const HermitianPair& direction, const SolverOptions& opts) {
  const Surrogate s(anchor, dc);
  return armijo_step(x, s, s.gradient(x), direction, opts.armijo);
}

IteratePoint default_init(const DerivedConstants& dc, double P_R, bool an_enabled) {
  const int n = dc.dim();
  IteratePoint x = IteratePoint::zero(n);
  if (n == 0) return x;
  if (an_enabled) {
    const double level = P_R / (2.0 * n);
    x.W = CMatrix::Identity(n, n) * level;
    x.Q = CMatrix::Identity(n, n) * level;
  } else {
    x.W = CMatrix::Identity(n, n) * (P_R / n);
  }
  return x;
}

SolveResult mm_solve(const IteratePoint& init, const DerivedConstants& dc, const SolverOptions& opts,
                     const Projector& project) {
  opts.validate();
  check_feasible(init, dc, opts.P_R);
  using Clock = std::chrono::steady_clock;

  Rng rng(opts.seed, 0x4d4d);
  SolveResult res;
  res.trace.sigma = opts.armijo.sigma;
  IteratePoint x = init;
  double phi = lifted_objective(x.W, x.Q, dc);
  double prev_surrogate = std::numeric_limits<double>::quiet_NaN();
  const bool until_converged = opts.inner.schedule == InnerBudget::Schedule::kUntilConverged;

  res.trace.stop = StopReason::kMaxOuter;
  for (int k = 0; k < opts.max_outer; ++k) {
    const auto t0 = Clock::now();
    const Surrogate s(x, dc);
    const HermitianPair g0 = s.gradient(x);
    const GradientMapping gm0 = gradient_mapping(x, g0, project);
    res.trace.final_gm_norm = gm0.norm;
    if (gm0.norm <= opts.stationarity_tol) {
      res.trace.stop = StopReason::kStationary;
      break;
    }

    const int L = inner_budget(opts.inner, rng);
    IteratePoint y = x;
    double value = s.anchor_value();
    double first_step = 0.0;
    int used = 0;
    for (int l = 0; l < L; ++l) {
      HermitianPair g = l == 0 ? g0 : s.gradient(y);
      GradientMapping gm = l == 0 ? gm0 : gradient_mapping(y, g, project);
      if (until_converged && l > 0 && gm.norm <= opts.inner.tol) break;
      StepResult st = opts.step_rule == StepRule::kArmijo ? armijo_step(y, s, g, gm.direction, opts.armijo)
                                                          : limited_minimization(y, s, g, gm.direction, opts);
      if (st.stalled) break;
      if (l == 0) first_step = st.step;
      y = std::move(st.x_next);
      value = st.value;
      ++used;
    }
    if (used == 0) {
      res.trace.stop = StopReason::kStalled;
      break;
    }

    const double phi_next = lifted_objective(y.W, y.Q, dc);
    IterationRecord rec;
    rec.k = k;
    rec.phi = phi;
    rec.phi_next = phi_next;
    rec.surrogate = value;
    rec.gm_norm = gm0.norm;
    rec.first_step = first_step;
    rec.progress = value - s.anchor_value();
    rec.progress_ratio = rec.progress / (gm0.norm * gm0.norm);
    rec.inner_iterations = used;
    if (opts.record_wall_time)
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    res.trace.iterations.push_back(rec);

    x = std::move(y);
    phi = phi_next;

    if (!std::isnan(prev_surrogate) &&
        std::abs(value - prev_surrogate) / std::max(std::abs(prev_surrogate), 1e-12) < opts.outer_tol) {
      res.trace.stop = StopReason::kSurrogateTol;
      break;
    }
    prev_surrogate = value;
  }

  if (res.trace.stop != StopReason::kStationary && res.trace.stop != StopReason::kStalled)
    res.trace.final_gm_norm = gradient_mapping(x, Surrogate(x, dc), project).norm;
  res.x = std::move(x);
  res.phi = phi;
  return res;
}

SolveResult inexact_mm_solve(const IteratePoint& init, const DerivedConstants& dc, const SolverOptions& opts) {
  const double P_R = opts.P_R;
  const bool an = opts.an_enabled;
  return mm_solve(init, dc, opts, [P_R, an](const HermitianPair& m) { return project_feasible(m, P_R, an); });
}

}  // namespace secrelay
