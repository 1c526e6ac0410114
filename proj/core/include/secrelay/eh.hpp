#pragma once

#include "secrelay/lifted.hpp"
#include "secrelay/solver.hpp"

namespace secrelay {

/// Energy-harvesting requirement at Eve: tau (received relay power + theta1) >= epsilon.
struct EhConfig {
  double tau = 0.1;
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;  // epsilon - tau theta1
};

EhConfig make_eh_config(double tau, double epsilon, const DerivedConstants& dc);

/// tau P_R ||V0^H h_RE||^2 >= epsilon_tilde.
bool eh_feasible(const EhConfig& ehc, const DerivedConstants& dc, double P_R);

/// tau v_E^H (W + Q) v_E - epsilon_tilde (nonnegative iff the EH constraint holds).
double eh_slack(const IteratePoint& x, const EhConfig& ehc, const DerivedConstants& dc);

struct EhProjection {
  IteratePoint x;
  double lambda = 0.0;  // EH multiplier
  double level = 0.0;   // trace multiplier
};

/// Euclidean projection onto the trace/PSD set intersected with the EH
/// half-space, via bisection on the EH multiplier. Throws InfeasibleEH.
EhProjection water_fill_eh(const CMatrix& M_W, const CMatrix& M_Q, double P_R, const EhConfig& ehc,
                           const DerivedConstants& dc, bool an_enabled = true);

/// Projection of the shifted inputs (M + lambda tau v_E v_E^H) onto the trace/PSD set.
IteratePoint project_shifted(const CMatrix& M_W, const CMatrix& M_Q, double P_R, double lambda,
                             const EhConfig& ehc, const DerivedConstants& dc, bool an_enabled = true);

inline IteratePoint project_feasible_eh(const CMatrix& M_W, const CMatrix& M_Q, double P_R, const EhConfig& ehc,
                                        const DerivedConstants& dc, bool an_enabled = true) {
  return water_fill_eh(M_W, M_Q, P_R, ehc, dc, an_enabled).x;
}

Projector eh_projector(double P_R, const EhConfig& ehc, const DerivedConstants& dc, bool an_enabled = true);

/// The plain initializer projected onto the EH-feasible set.
IteratePoint default_init_eh(const DerivedConstants& dc, double P_R, const EhConfig& ehc, bool an_enabled = true);

SolveResult inexact_mm_solve_eh(const IteratePoint& init, const DerivedConstants& dc, const SolverOptions& opts,
                                const EhConfig& ehc);

}  // namespace secrelay
