#include "secrelay/eh.hpp"

#include <cmath>

#include "secrelay/projection.hpp"

namespace secrelay {

namespace {

constexpr int kMaxDoublings = 200;
constexpr int kMaxBisections = 300;

}  // namespace

EhConfig make_eh_config(double tau, double epsilon, const DerivedConstants& dc) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("power transfer efficiency must lie in (0, 1]");
  if (!(epsilon >= 0.0)) throw ConfigError("harvesting threshold must be nonnegative");
  return {tau, epsilon, epsilon - tau * dc.theta1};
}

bool eh_feasible(const EhConfig& ehc, const DerivedConstants& dc, double P_R) {
  return ehc.tau * P_R * dc.v_E.squaredNorm() >= ehc.epsilon_tilde;
}

double eh_slack(const IteratePoint& x, const EhConfig& ehc, const DerivedConstants& dc) {
  return ehc.tau * (quad(dc.v_E, x.W) + quad(dc.v_E, x.Q)) - ehc.epsilon_tilde;
}

IteratePoint project_shifted(const CMatrix& M_W, const CMatrix& M_Q, double P_R, double lambda,
                             const EhConfig& ehc, const DerivedConstants& dc, bool an_enabled) {
  if (lambda == 0.0) return project_feasible(M_W, M_Q, P_R, an_enabled);
  const CMatrix shift = (lambda * ehc.tau) * (dc.v_E * dc.v_E.adjoint());
  return project_feasible(M_W + shift, M_Q + shift, P_R, an_enabled);
}

EhProjection water_fill_eh(const CMatrix& M_W, const CMatrix& M_Q, double P_R, const EhConfig& ehc,
                           const DerivedConstants& dc, bool an_enabled) {
  if (!eh_feasible(ehc, dc, P_R))
    throw InfeasibleEH("harvesting threshold exceeds what the relay budget can deliver to Eve");

  auto solve = [&](double lambda) {
    const CMatrix shift = (lambda * ehc.tau) * (dc.v_E * dc.v_E.adjoint());
    return water_fill(M_W + shift, M_Q + shift, P_R, an_enabled);
  };

  EhProjection out;
  Projection p = solve(0.0);
  if (eh_slack(p.x, ehc, dc) >= 0.0) {
    out.x = std::move(p.x);
    out.level = p.level;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  Projection p_hi = solve(hi);
  for (int i = 0; i < kMaxDoublings && eh_slack(p_hi.x, ehc, dc) < 0.0; ++i) {
    lo = hi;
    hi *= 2.0;
    p_hi = solve(hi);
  }

  const double scale = std::max(std::abs(ehc.epsilon_tilde), 1e-300);
  for (int i = 0; i < kMaxBisections; ++i) {
    const double slack = eh_slack(p_hi.x, ehc, dc);
    if (slack >= 0.0 && hi * slack <= 1e-12 * scale) break;
    if (hi - lo <= 1e-15 * hi) break;
    const double mid = 0.5 * (lo + hi);
    Projection p_mid = solve(mid);
    if (eh_slack(p_mid.x, ehc, dc) >= 0.0) {
      hi = mid;
      p_hi = std::move(p_mid);
    } else {
      lo = mid;
    }
  }
  out.x = std::move(p_hi.x);
  out.level = p_hi.level;
  out.lambda = hi;
  return out;
}

Projector eh_projector(double P_R, const EhConfig& ehc, const DerivedConstants& dc, bool an_enabled) {
  return [P_R, ehc, &dc, an_enabled](const HermitianPair& m) {
    return project_feasible_eh(m.W, m.Q, P_R, ehc, dc, an_enabled);
  };
}

IteratePoint default_init_eh(const DerivedConstants& dc, double P_R, const EhConfig& ehc, bool an_enabled) {
  const IteratePoint x0 = default_init(dc, P_R, an_enabled);
  return project_feasible_eh(x0.W, x0.Q, P_R, ehc, dc, an_enabled);
}

SolveResult inexact_mm_solve_eh(const IteratePoint& init, const DerivedConstants& dc, const SolverOptions& opts,
                                const EhConfig& ehc) {
  if (!eh_feasible(ehc, dc, opts.P_R))
    throw InfeasibleEH("harvesting threshold exceeds what the relay budget can deliver to Eve");
  if (eh_slack(init, ehc, dc) < -1e-8 * std::max(1.0, std::abs(ehc.epsilon_tilde)))
    throw InfeasiblePoint("initial point violates the harvesting constraint");
  return mm_solve(init, dc, opts, eh_projector(opts.P_R, ehc, dc, opts.an_enabled));
}

}  // namespace secrelay
