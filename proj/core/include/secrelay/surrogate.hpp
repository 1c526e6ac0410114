#pragma once

#include "secrelay/lifted.hpp"
#include "secrelay/rates.hpp"

namespace secrelay {

/// Concave minorant of the lifted objective, anchored at a feasible point.
///
/// g1 (the sum of log(c_i + beta_i)) is replaced by its tangent plane at the
/// anchor and g2 = log X by log X_hat - 1 + X / X_hat. The result is tight at
/// the anchor and lies below phi everywhere on the domain.
class Surrogate {
 public:
  Surrogate(const IteratePoint& anchor, const DerivedConstants& dc);

  double value(const IteratePoint& x) const;
  double value(const TraceCoordinates& t) const;

  /// Gradient w.r.t. (W, Q) under <A, B> = Re Tr(A^H B); Hermitian by construction.
  HermitianPair gradient(const IteratePoint& x) const;
  HermitianPair gradient(const TraceCoordinates& t) const;

  /// phi(anchor) == value(anchor).
  double anchor_value() const { return anchor_value_; }
  const IteratePoint& anchor() const { return anchor_; }
  const DerivedConstants& constants() const { return *dc_; }

 private:
  const DerivedConstants* dc_;
  IteratePoint anchor_;
  std::array<double, 2> beta_hat_{};
  double g1_hat_ = 0.0;
  double log_x_hat_ = 0.0;
  double x_hat_ = 1.0;
  double anchor_value_ = 0.0;
};

double surrogate_value(const IteratePoint& x, const IteratePoint& anchor, const DerivedConstants& dc);

HermitianPair surrogate_gradient(const IteratePoint& x, const IteratePoint& anchor,
                                 const DerivedConstants& dc);

/// Gradient of the lifted objective itself (the surrogate anchored at x).
HermitianPair objective_gradient(const IteratePoint& x, const DerivedConstants& dc);

}  // namespace secrelay
