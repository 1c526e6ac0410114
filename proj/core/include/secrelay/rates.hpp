#pragma once

#include <array>

#include "secrelay/channel.hpp"

namespace secrelay {

/// Eve's equivalent 2x2 multiple-access model: y = H_E [s_A; s_B] + n, n ~ CN(0, Psi).
struct EveModel {
  Eigen::Matrix2cd H_E;
  Eigen::Matrix2d Psi;  // diagonal
  Eigen::Matrix2d P;    // diag(p_A, p_B)
};

/// The six quadratic forms through which (W, Q) enter every rate:
/// v^H W v and v^H Q v for v in {V0^H h_RA, V0^H h_RB, V0^H h_RE}.
struct TraceCoordinates {
  double wa = 0.0, qa = 0.0;
  double wb = 0.0, qb = 0.0;
  double we = 0.0, qe = 0.0;
};

TraceCoordinates trace_coordinates(const CMatrix& Wl, const CMatrix& Q, const DerivedConstants& dc);

/// alpha_i / beta_i: received power at Alice (1) and Bob (2) with and without
/// the useful term; psi_i: Eve's interference-plus-noise levels;
/// w_energy: v_E^H W v_E.
struct FunctionalValues {
  std::array<double, 2> alpha{};
  std::array<double, 2> beta{};
  std::array<double, 2> psi{};
  double w_energy = 0.0;
};

FunctionalValues functionals(const TraceCoordinates& t, const DerivedConstants& dc);
FunctionalValues functionals(const CMatrix& Wl, const CMatrix& Q, const DerivedConstants& dc);

/// Argument of the log in Eve's rate numerator, as a function of the functionals.
/// FD: psi2^2 + theta1 (psi1 + psi2) + theta2 w / zeta (convex quadratic).
/// HD: psi1 (psi2 + theta1) + (w / zeta) ((p~_A + p~_B) psi2 + theta2), with psi2 fixed.
double eve_numerator(const FunctionalValues& fv, const DerivedConstants& dc);

/// 1 for FD, 1/2 for HD.
double rate_scale(const DerivedConstants& dc);

// ---- physical domain --------------------------------------------------------

/// SINR of the symbol decoded at `node` (Alice decodes Bob's stream).
double sinr_legitimate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                       Node node);

/// log(1 + SINR) in nats, without the HD factor.
double legitimate_rate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                       Node node);

EveModel eve_noise_cov(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc);

/// log|I + H_E P H_E^H Psi^-1| evaluated directly.
double eve_sum_rate_determinant(const RelaySolution& sol, const ChannelSet& ch,
                                const DerivedConstants& dc);

/// Closed-form scalar expression for Eve's sum rate. Cross-checked against
/// the determinant form; throws std::logic_error if the two disagree.
double eve_sum_rate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc);

/// R_A + R_B - R_E (scaled by 1/2 in HD). Not clipped at zero.
double sum_secrecy_rate(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc);

/// zeta Tr(W0 W0^H) + Tr(Q0).
double relay_power(const RelaySolution& sol, const DerivedConstants& dc);

/// Power harvested at Eve: tau (h_RE^H (zeta W0 W0^H + Q0) h_RE + theta1).
double harvested_power(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                       double tau);

/// Lifted objective phi = f - g1 - g2 over Hermitian PSD (W, Q).
double lifted_objective(const CMatrix& Wl, const CMatrix& Q, const DerivedConstants& dc);

}  // namespace secrelay
