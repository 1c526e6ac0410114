#pragma once

#include <string>
#include <vector>

#include "secrelay/eh.hpp"
#include "secrelay/lifted.hpp"
#include "secrelay/rates.hpp"

namespace secrelay {

/// x -> <A_W, W> + <A_Q, Q>, pinned at `target`.
struct LinearFunctional {
  std::string name;
  CMatrix A_W;
  CMatrix A_Q;
  double target = 0.0;
  // May be turned into "does not increase" when equality leaves no null direction.
  bool relaxable = false;

  double eval(const IteratePoint& x) const { return inner(A_W, x.W) + inner(A_Q, x.Q); }
};

/// The functionals every reduction step must keep fixed.
struct ConstraintBundle {
  std::vector<LinearFunctional> items;

  /// alpha_1, alpha_2, beta_1, beta_2, psi_1, psi_2 (constant parts dropped),
  /// v_E^H W v_E and the total trace, with targets read off `anchor`.
  static ConstraintBundle at(const IteratePoint& anchor, const DerivedConstants& dc);
  /// As above plus the harvested-power functional tau v_E^H (W + Q) v_E.
  static ConstraintBundle at_eh(const IteratePoint& anchor, const DerivedConstants& dc, const EhConfig& ehc);

  std::vector<double> values(const IteratePoint& x) const;
  /// Largest |value - target| over the bundle.
  double max_violation(const IteratePoint& x) const;
};

struct RankReduction {
  IteratePoint x;
  int steps = 0;
  int rank_W = 0;
  int rank_Q = 0;
  bool relaxed = false;  // some relaxable functional was only kept from increasing
};

/// Null-direction rank reduction: repeatedly moves along a Hermitian direction
/// supported on the current ranges that annihilates every functional, until
/// rank(W) <= target_rank_W or no such direction exists.
RankReduction reduce_rank(const IteratePoint& anchor, const ConstraintBundle& bundle, int target_rank_W = 2,
                          double null_tol = 1e-10);

IteratePoint rank_reduce(const IteratePoint& anchor, const DerivedConstants& dc);
IteratePoint rank_reduce_eh(const IteratePoint& anchor, const DerivedConstants& dc, const EhConfig& ehc);

/// Numerical rank of a PSD matrix: eigenvalues above rel_tol * largest.
int numerical_rank(const CMatrix& a, double rel_tol = 1e-12);

/// lambda_3 / lambda_1 of a PSD matrix (0 if fewer than three eigenvalues).
double rank_ratio(const CMatrix& a);

/// W with W W^H ~ Wl; throws RankExceeded if lambda_3 > tol * lambda_1.
CMatrix decompose_rank_two(const CMatrix& Wl, double tol = 1e-6);

/// Gradient-mapping norm of phi over {Tr(W W^H) + Tr Q <= P_R, Q >= 0} in the
/// unlifted variables W ((N - r) x 2) and Q. Zero exactly at KKT points.
/// With an_enabled = false the set is {Tr(W W^H) <= P_R, Q = 0}.
double stationarity_residual(const CMatrix& W, const CMatrix& Q, const DerivedConstants& dc, double P_R,
                             bool an_enabled = true);

/// Lifted gradient-mapping norm of phi at (W W^H, Q) over the EH-constrained
/// set (the unlifted EH set is not convex).
double stationarity_residual_eh(const CMatrix& W, const CMatrix& Q, const DerivedConstants& dc, double P_R,
                                const EhConfig& ehc, bool an_enabled = true);

struct Purified {
  IteratePoint lifted;  // rank-reduced (W W^H, Q)
  CMatrix W;            // (N - r) x 2
  CMatrix Q;
  RelaySolution physical;
  double phi = 0.0;
  double rank_ratio = 0.0;
  int steps = 0;
};

Purified purify(const IteratePoint& limit, const DerivedConstants& dc);
Purified purify_eh(const IteratePoint& limit, const DerivedConstants& dc, const EhConfig& ehc);

}  // namespace secrelay
