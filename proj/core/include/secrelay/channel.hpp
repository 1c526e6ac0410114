#pragma once

#include <cstdint>
#include <utility>

#include "secrelay/types.hpp"

namespace secrelay {

/// One network instance: every channel, power, noise level and residual-SI
/// factor. Powers and variances are linear.
struct ChannelSet {
  CVector h_AR;  // Alice -> relay rx, length M
  CVector h_BR;  // Bob -> relay rx, length M
  CMatrix H_RR;  // relay tx -> relay rx, M x N
  CVector h_RA;  // relay tx -> Alice, length N
  CVector h_RB;
  CVector h_RE;
  Complex h_AE{0.0, 0.0};
  Complex h_BE{0.0, 0.0};
  Complex h_AA{0.0, 0.0};
  Complex h_BB{0.0, 0.0};
  double p_A = 1.0;
  double p_B = 1.0;
  double sigma2_A = 1.0;
  double sigma2_B = 1.0;
  double sigma2_E = 1.0;
  double sigma2_R = 1.0;
  double kappa_A = 0.0;
  double kappa_B = 0.0;

  int relay_rx() const { return static_cast<int>(h_AR.size()); }
  int relay_tx() const { return static_cast<int>(h_RA.size()); }

  /// Throws ConfigError on inconsistent dimensions or out-of-range scalars.
  void validate() const;
};

/// Per-link variances of the i.i.d. CN(0, v) channel entries.
struct LinkVariances {
  double source_relay = 1.0;  // h_AR, h_BR
  double self_relay = 1.0;    // H_RR
  double relay_node = 1.0;    // h_RA, h_RB
  double relay_eve = 1.0;     // h_RE
  double source_eve = 1.0;    // h_AE, h_BE (0 allowed: no direct links)
  double self_node = 1.0;     // h_AA, h_BB
};

struct NetworkSettings {
  int relay_tx = 6;  // N
  int relay_rx = 3;  // M
  LinkVariances variances;
  double p_A = 1.0;
  double p_B = 1.0;
  double sigma2_A = 1.0;
  double sigma2_B = 1.0;
  double sigma2_E = 1.0;
  double sigma2_R = 1.0;
  double kappa_A = 0.0;
  double kappa_B = 0.0;
};

ChannelSet generate_channels(std::uint64_t seed, const NetworkSettings& settings);

struct NullspaceBasis {
  CMatrix V0;  // N x (N - r), orthonormal columns
  int rank = 0;
};

/// Right singular vectors of H_RR for the singular values at or below
/// tol * sigma_max. Throws NoNullingDimensions when nothing is left.
NullspaceBasis nullspace_basis(const CMatrix& H_RR, double tol = 1e-9);

struct MmseReceivers {
  CVector f_A;
  CVector f_B;
};

MmseReceivers mmse_receivers(const ChannelSet& ch);

/// Everything the optimizer consumes, precomputed once per instance.
struct DerivedConstants {
  Duplex duplex = Duplex::kFull;
  CVector f_A;
  CVector f_B;
  CMatrix V0;
  int r = 0;
  double zeta = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double p_tilde_A = 0.0;
  double p_tilde_B = 0.0;
  double sigma_tilde2_R = 0.0;
  double c1 = 0.0;  // sigma~_A^2
  double c2 = 0.0;  // sigma~_B^2
  double sigma2_E = 1.0;
  Complex f_tilde_AR{0.0, 0.0};
  Complex f_tilde_BR{0.0, 0.0};

  // Relay -> node channels seen through the nulling basis: V0^H h.
  CVector v_A;
  CVector v_B;
  CVector v_E;

  int dim() const { return static_cast<int>(V0.cols()); }
};

/// HD mode ignores kappa and H_RR (V0 = I, r = 0).
DerivedConstants derive_constants(const ChannelSet& ch, Duplex duplex = Duplex::kFull);

/// Physical-domain relay transmit design.
struct RelaySolution {
  CMatrix W0;  // N x 2
  CMatrix Q0;  // N x N
};

/// W0 = zeta^{-1/2} V0 W, Q0 = V0 Q V0^H.
RelaySolution to_physical(const CMatrix& W, const CMatrix& Q, const DerivedConstants& dc);

/// Inverse of to_physical on the nulling subspace: W = zeta^{1/2} V0^H W0.
/// Returns (W, Q).
std::pair<CMatrix, CMatrix> to_lifted(const RelaySolution& sol, const DerivedConstants& dc);

}  // namespace secrelay
