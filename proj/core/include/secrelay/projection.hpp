#pragma once

#include "secrelay/lifted.hpp"

namespace secrelay {

/// Smallest nu >= 0 with sum_i [eta_i - nu]^+ <= budget. Exact breakpoint
/// search over the sorted values, bisection if round-off defeats it.
double water_level(const RVector& eta, double budget);

struct Projection {
  IteratePoint x;
  double level = 0.0;  // common shrink level nu*
};

/// Euclidean projection of (M_W, M_Q) onto {W, Q >= 0, Tr W + Tr Q <= P_R}.
/// With an_enabled = false the Q block is pinned to zero.
Projection water_fill(const CMatrix& M_W, const CMatrix& M_Q, double P_R, bool an_enabled = true);

inline IteratePoint project_feasible(const CMatrix& M_W, const CMatrix& M_Q, double P_R,
                                     bool an_enabled = true) {
  return water_fill(M_W, M_Q, P_R, an_enabled).x;
}

inline IteratePoint project_feasible(const HermitianPair& m, double P_R, bool an_enabled = true) {
  return water_fill(m.W, m.Q, P_R, an_enabled).x;
}

}  // namespace secrelay
