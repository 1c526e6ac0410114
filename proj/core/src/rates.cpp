#include "secrelay/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "secrelay/lifted.hpp"

namespace secrelay {

namespace {

double safe_log(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string("nonpositive log argument: ") + what);
  return std::log(x);
}

const CVector& relay_to(const ChannelSet& ch, Node node) {
  return node == Node::kAlice ? ch.h_RA : ch.h_RB;
}

// |h^H W0|^2 with W0 N x 2.
double beam_gain(const CVector& h, const CMatrix& W0) {
  return (h.adjoint() * W0).squaredNorm();
}

}  // namespace

double rate_scale(const DerivedConstants& dc) { return dc.duplex == Duplex::kFull ? 1.0 : 0.5; }

TraceCoordinates trace_coordinates(const CMatrix& Wl, const CMatrix& Q, const DerivedConstants& dc) {
  return {quad(dc.v_A, Wl), quad(dc.v_A, Q), quad(dc.v_B, Wl),
          quad(dc.v_B, Q),  quad(dc.v_E, Wl), quad(dc.v_E, Q)};
}

FunctionalValues functionals(const TraceCoordinates& t, const DerivedConstants& dc) {
  const double z = 1.0 / dc.zeta;
  FunctionalValues fv;
  fv.beta[0] = z * dc.sigma_tilde2_R * t.wa + t.qa;
  fv.beta[1] = z * dc.sigma_tilde2_R * t.wb + t.qb;
  fv.alpha[0] = fv.beta[0] + z * dc.p_tilde_B * t.wa;
  fv.alpha[1] = fv.beta[1] + z * dc.p_tilde_A * t.wb;
  if (dc.duplex == Duplex::kFull) {
    fv.psi[0] = z * dc.sigma_tilde2_R * t.we + t.qe + dc.sigma2_E + dc.theta1;
    fv.psi[1] = t.qe + dc.sigma2_E + t.we;
  } else {
    fv.psi[0] = z * dc.sigma_tilde2_R * t.we + t.qe + dc.sigma2_E;
    fv.psi[1] = dc.sigma2_E;
  }
  fv.w_energy = t.we;
  return fv;
}

FunctionalValues functionals(const CMatrix& Wl, const CMatrix& Q, const DerivedConstants& dc) {
  return functionals(trace_coordinates(Wl, Q, dc), dc);
}

double eve_numerator(const FunctionalValues& fv, const DerivedConstants& dc) {
  const double x = fv.w_energy / dc.zeta;
  const double p1 = fv.psi[0];
  const double p2 = fv.psi[1];
  if (dc.duplex == Duplex::kFull) return p2 * p2 + dc.theta1 * (p1 + p2) + dc.theta2 * x;
  return p1 * (p2 + dc.theta1) + x * ((dc.p_tilde_A + dc.p_tilde_B) * p2 + dc.theta2);
}

double sinr_legitimate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                       Node node) {
  const CVector& h = relay_to(ch, node);
  const double gain = beam_gain(h, sol.W0);
  const double an = quad(h, sol.Q0);
  // Alice hears Bob's symbol, so the useful power is Bob's effective power.
  const double p_useful = node == Node::kAlice ? dc.p_tilde_B : dc.p_tilde_A;
  const double c = node == Node::kAlice ? dc.c1 : dc.c2;
  return p_useful * gain / (dc.sigma_tilde2_R * gain + an + c);
}

double legitimate_rate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                       Node node) {
  return std::log1p(sinr_legitimate(sol, ch, dc, node));
}

EveModel eve_noise_cov(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc) {
  const double gain = beam_gain(ch.h_RE, sol.W0);
  const double an = quad(ch.h_RE, sol.Q0);
  const double a = std::sqrt(gain);
  EveModel m;
  m.H_E << a * dc.f_tilde_AR, a * dc.f_tilde_BR, ch.h_AE, ch.h_BE;
  m.P = Eigen::Vector2d(ch.p_A, ch.p_B).asDiagonal();
  m.Psi.setZero();
  if (dc.duplex == Duplex::kFull) {
    m.Psi(0, 0) = dc.sigma_tilde2_R * gain + an + ch.sigma2_E + dc.theta1;
    m.Psi(1, 1) = an + ch.sigma2_E + (dc.p_tilde_A + dc.p_tilde_B + dc.sigma_tilde2_R) * gain;
  } else {
    m.Psi(0, 0) = dc.sigma_tilde2_R * gain + an + ch.sigma2_E;
    m.Psi(1, 1) = ch.sigma2_E;
  }
  return m;
}

double eve_sum_rate_determinant(const RelaySolution& sol, const ChannelSet& ch,
                                const DerivedConstants& dc) {
  const EveModel m = eve_noise_cov(sol, ch, dc);
  Eigen::Matrix2cd psi_inv = Eigen::Matrix2cd::Zero();
  psi_inv(0, 0) = 1.0 / m.Psi(0, 0);
  psi_inv(1, 1) = 1.0 / m.Psi(1, 1);
  const Eigen::Matrix2cd M =
      Eigen::Matrix2cd::Identity() + m.H_E * m.P.cast<Complex>() * m.H_E.adjoint() * psi_inv;
  return safe_log(M.determinant().real(), "Eve determinant");
}

double eve_sum_rate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc) {
  const EveModel m = eve_noise_cov(sol, ch, dc);
  FunctionalValues fv;
  fv.psi = {m.Psi(0, 0), m.Psi(1, 1)};
  fv.w_energy = dc.zeta * beam_gain(ch.h_RE, sol.W0);
  const double scalar = safe_log(eve_numerator(fv, dc), "Eve numerator") -
                        safe_log(fv.psi[0] * fv.psi[1], "Eve noise product");
  const double det = eve_sum_rate_determinant(sol, ch, dc);
  if (std::abs(det - scalar) > 1e-9 * std::max(1.0, std::abs(scalar)))
    throw std::logic_error("Eve rate: determinant and scalar forms disagree");
  return scalar;
}

double sum_secrecy_rate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc) {
  const double ra = legitimate_rate(sol, ch, dc, Node::kAlice);
  const double rb = legitimate_rate(sol, ch, dc, Node::kBob);
  return rate_scale(dc) * (ra + rb - eve_sum_rate(sol, ch, dc));
}

double relay_power(const RelaySolution& sol, const DerivedConstants& dc) {
  return dc.zeta * sol.W0.squaredNorm() + sol.Q0.trace().real();
}

double harvested_power(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                       double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("power transfer efficiency must lie in (0, 1]");
  const double rx = dc.zeta * beam_gain(ch.h_RE, sol.W0) + quad(ch.h_RE, sol.Q0);
  return tau * (rx + dc.theta1);
}

double lifted_objective(const CMatrix& Wl, const CMatrix& Q, const DerivedConstants& dc) {
  if (!is_hermitian(Wl) || !is_hermitian(Q)) throw DomainError("lifted objective needs Hermitian input");
  const FunctionalValues fv = functionals(Wl, Q, dc);
  const std::array<double, 2> c{dc.c1, dc.c2};
  double phi = 0.0;
  for (int i = 0; i < 2; ++i)
    phi += safe_log(c[i] + fv.alpha[i], "c + alpha") - safe_log(c[i] + fv.beta[i], "c + beta");
  phi += safe_log(fv.psi[0], "psi1") + safe_log(fv.psi[1], "psi2");
  phi -= safe_log(eve_numerator(fv, dc), "Eve numerator");
  return rate_scale(dc) * phi;
}

}  // namespace secrelay
