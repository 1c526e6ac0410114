#include "secrelay/surrogate.hpp"

#include <cmath>
#include <string>

namespace secrelay {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string("nonpositive log argument: ") + what);
}

CMatrix outer(const CVector& v) { return v * v.adjoint(); }

}  // namespace

Surrogate::Surrogate(const IteratePoint& anchor, const DerivedConstants& dc)
    : dc_(&dc), anchor_(anchor) {
  const FunctionalValues fv = functionals(anchor.W, anchor.Q, dc);
  const std::array<double, 2> c{dc.c1, dc.c2};
  for (int i = 0; i < 2; ++i) {
    beta_hat_[i] = fv.beta[i];
    require_positive(c[i] + fv.beta[i], "c + beta at anchor");
    g1_hat_ += std::log(c[i] + fv.beta[i]);
  }
  x_hat_ = eve_numerator(fv, dc);
  require_positive(x_hat_, "Eve numerator at anchor");
  log_x_hat_ = std::log(x_hat_);
  anchor_value_ = value(anchor);
}

double Surrogate::value(const IteratePoint& x) const {
  return value(trace_coordinates(x.W, x.Q, *dc_));
}

double Surrogate::value(const TraceCoordinates& t) const {
  const DerivedConstants& dc = *dc_;
  const FunctionalValues fv = functionals(t, dc);
  const std::array<double, 2> c{dc.c1, dc.c2};
  double f = 0.0;
  double g1 = g1_hat_;
  for (int i = 0; i < 2; ++i) {
    require_positive(c[i] + fv.alpha[i], "c + alpha");
    f += std::log(c[i] + fv.alpha[i]);
    g1 += (fv.beta[i] - beta_hat_[i]) / (c[i] + beta_hat_[i]);
  }
  require_positive(fv.psi[0], "psi1");
  require_positive(fv.psi[1], "psi2");
  f += std::log(fv.psi[0]) + std::log(fv.psi[1]);
  const double g2 = log_x_hat_ - 1.0 + eve_numerator(fv, dc) / x_hat_;
  return rate_scale(dc) * (f - g1 - g2);
}

HermitianPair Surrogate::gradient(const IteratePoint& x) const {
  return gradient(trace_coordinates(x.W, x.Q, *dc_));
}

HermitianPair Surrogate::gradient(const TraceCoordinates& t) const {
  const DerivedConstants& dc = *dc_;
  const FunctionalValues fv = functionals(t, dc);
  const double z = 1.0 / dc.zeta;
  const double sr = dc.sigma_tilde2_R;
  const double ca = dc.c1 + fv.alpha[0];
  const double cb = dc.c2 + fv.alpha[1];
  require_positive(ca, "c + alpha");
  require_positive(cb, "c + alpha");
  require_positive(fv.psi[0], "psi1");
  require_positive(fv.psi[1], "psi2");
  const double ka = 1.0 / (dc.c1 + beta_hat_[0]);
  const double kb = 1.0 / (dc.c2 + beta_hat_[1]);

  // d(phi~)/d(coordinate): legitimate part.
  const double d_wa = z * (sr + dc.p_tilde_B) / ca - z * sr * ka;
  const double d_qa = 1.0 / ca - ka;
  const double d_wb = z * (sr + dc.p_tilde_A) / cb - z * sr * kb;
  const double d_qb = 1.0 / cb - kb;

  // Eve part: log psi1 + log psi2 - X / X_hat.
  const double p1 = fv.psi[0];
  const double p2 = fv.psi[1];
  double d_we = 0.0;
  double d_qe = 0.0;
  if (dc.duplex == Duplex::kFull) {
    const double dx_dwe = 2.0 * p2 + dc.theta1 * (z * sr + 1.0) + dc.theta2 * z;
    const double dx_dqe = 2.0 * p2 + 2.0 * dc.theta1;
    d_we = z * sr / p1 + 1.0 / p2 - dx_dwe / x_hat_;
    d_qe = 1.0 / p1 + 1.0 / p2 - dx_dqe / x_hat_;
  } else {
    const double dx_dwe = z * sr * (p2 + dc.theta1) + z * ((dc.p_tilde_A + dc.p_tilde_B) * p2 + dc.theta2);
    const double dx_dqe = p2 + dc.theta1;
    d_we = z * sr / p1 - dx_dwe / x_hat_;
    d_qe = 1.0 / p1 - dx_dqe / x_hat_;
  }

  const double s = rate_scale(dc);
  const CMatrix aa = outer(dc.v_A);
  const CMatrix bb = outer(dc.v_B);
  const CMatrix ee = outer(dc.v_E);
  HermitianPair g;
  g.W = s * (d_wa * aa + d_wb * bb + d_we * ee);
  g.Q = s * (d_qa * aa + d_qb * bb + d_qe * ee);
  return g;
}

double surrogate_value(const IteratePoint& x, const IteratePoint& anchor, const DerivedConstants& dc) {
  return Surrogate(anchor, dc).value(x);
}

HermitianPair surrogate_gradient(const IteratePoint& x, const IteratePoint& anchor,
                                 const DerivedConstants& dc) {
  return Surrogate(anchor, dc).gradient(x);
}

HermitianPair objective_gradient(const IteratePoint& x, const DerivedConstants& dc) {
  return Surrogate(x, dc).gradient(x);
}

}  // namespace secrelay
