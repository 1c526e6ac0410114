#include "secrelay/channel.hpp"

#include <cmath>
#include <string>

#include "secrelay/rng.hpp"

namespace secrelay {

const char* to_string(Duplex d) { return d == Duplex::kFull ? "FD" : "HD"; }

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ChannelSet::validate() const {
  const auto m = h_AR.size();
  const auto n = h_RA.size();
  require(m >= 1 && n >= 1, "relay needs at least one rx and one tx antenna");
  require(h_BR.size() == m, "h_BR length must equal M");
  require(H_RR.rows() == m && H_RR.cols() == n, "H_RR must be M x N");
  require(h_RB.size() == n && h_RE.size() == n, "relay->node channels must have length N");
  require(p_A >= 0.0 && p_B >= 0.0, "source powers must be nonnegative");
  require(sigma2_A > 0.0 && sigma2_B > 0.0 && sigma2_E > 0.0 && sigma2_R > 0.0,
          "noise variances must be positive");
  require(kappa_A >= 0.0 && kappa_A <= 1.0 && kappa_B >= 0.0 && kappa_B <= 1.0,
          "residual SI factors must lie in [0, 1]");
}

ChannelSet generate_channels(std::uint64_t seed, const NetworkSettings& s) {
  require(s.relay_tx >= 1 && s.relay_rx >= 1, "N and M must be at least 1");
  const auto& v = s.variances;
  require(v.source_relay > 0.0 && v.self_relay > 0.0 && v.relay_node > 0.0 &&
              v.relay_eve > 0.0 && v.self_node > 0.0,
          "channel variances must be positive");
  require(v.source_eve >= 0.0, "direct-link variance must be nonnegative");

  Rng rng(seed);
  ChannelSet ch;
  const int n = s.relay_tx;
  const int m = s.relay_rx;
  ch.h_AR = rng.complex_normal(m, v.source_relay);
  ch.h_BR = rng.complex_normal(m, v.source_relay);
  ch.H_RR = rng.complex_normal(m, n, v.self_relay);
  ch.h_RA = rng.complex_normal(n, v.relay_node);
  ch.h_RB = rng.complex_normal(n, v.relay_node);
  ch.h_RE = rng.complex_normal(n, v.relay_eve);
  // Always draw, so that toggling direct links leaves every other channel unchanged.
  const Complex ae = rng.complex_normal(1.0);
  const Complex be = rng.complex_normal(1.0);
  const double direct = std::sqrt(v.source_eve);
  ch.h_AE = v.source_eve > 0.0 ? direct * ae : Complex{0.0, 0.0};
  ch.h_BE = v.source_eve > 0.0 ? direct * be : Complex{0.0, 0.0};
  ch.h_AA = rng.complex_normal(v.self_node);
  ch.h_BB = rng.complex_normal(v.self_node);

  ch.p_A = s.p_A;
  ch.p_B = s.p_B;
  ch.sigma2_A = s.sigma2_A;
  ch.sigma2_B = s.sigma2_B;
  ch.sigma2_E = s.sigma2_E;
  ch.sigma2_R = s.sigma2_R;
  ch.kappa_A = s.kappa_A;
  ch.kappa_B = s.kappa_B;
  ch.validate();
  return ch;
}

NullspaceBasis nullspace_basis(const CMatrix& H_RR, double tol) {
  if (!(tol > 0.0)) throw ConfigError("nullspace tolerance must be positive");
  const auto n = H_RR.cols();
  NullspaceBasis out;
  if (H_RR.rows() == 0 || n == 0) {
    out.V0 = CMatrix::Identity(n, n);
    return out;
  }
  Eigen::JacobiSVD<CMatrix> svd(H_RR, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (smax > 0.0 && sv(i) > tol * smax) ++r;
  if (r >= n) throw NoNullingDimensions();
  out.rank = r;
  out.V0 = svd.matrixV().rightCols(n - r);
  return out;
}

MmseReceivers mmse_receivers(const ChannelSet& ch) {
  const auto m = ch.h_AR.size();
  CMatrix cov = ch.sigma2_R * CMatrix::Identity(m, m);
  cov.noalias() += ch.p_A * ch.h_AR * ch.h_AR.adjoint();
  cov.noalias() += ch.p_B * ch.h_BR * ch.h_BR.adjoint();
  CMatrix rhs(m, 2);
  rhs.col(0) = ch.h_AR;
  rhs.col(1) = ch.h_BR;
  const Eigen::LLT<CMatrix> llt(cov);
  const CMatrix f = llt.solve(rhs);
  return {f.col(0), f.col(1)};
}

DerivedConstants derive_constants(const ChannelSet& ch, Duplex duplex) {
  ch.validate();
  DerivedConstants dc;
  dc.duplex = duplex;
  const auto mmse = mmse_receivers(ch);
  dc.f_A = mmse.f_A;
  dc.f_B = mmse.f_B;

  if (duplex == Duplex::kFull) {
    auto basis = nullspace_basis(ch.H_RR);
    dc.V0 = std::move(basis.V0);
    dc.r = basis.rank;
  } else {
    dc.V0 = CMatrix::Identity(ch.relay_tx(), ch.relay_tx());
    dc.r = 0;
  }

  const CVector g = dc.f_A + dc.f_B;
  dc.f_tilde_AR = g.dot(ch.h_AR);
  dc.f_tilde_BR = g.dot(ch.h_BR);
  dc.p_tilde_A = ch.p_A * std::norm(dc.f_tilde_AR);
  dc.p_tilde_B = ch.p_B * std::norm(dc.f_tilde_BR);
  dc.sigma_tilde2_R = ch.sigma2_R * g.squaredNorm();
  dc.zeta = dc.p_tilde_A + dc.p_tilde_B + dc.sigma_tilde2_R;
  if (!(dc.zeta > 0.0)) throw DomainError("zeta must be positive (relay receives nothing)");

  dc.theta1 = ch.p_A * std::norm(ch.h_AE) + ch.p_B * std::norm(ch.h_BE);
  const Complex cross =
      ch.p_A * std::conj(dc.f_tilde_AR) * ch.h_AE + ch.p_B * std::conj(dc.f_tilde_BR) * ch.h_BE;
  dc.theta2 = (dc.p_tilde_A + dc.p_tilde_B) * dc.theta1 - std::norm(cross);

  const bool fd = duplex == Duplex::kFull;
  dc.c1 = ch.sigma2_A + (fd ? ch.kappa_A * ch.p_A * std::norm(ch.h_AA) : 0.0);
  dc.c2 = ch.sigma2_B + (fd ? ch.kappa_B * ch.p_B * std::norm(ch.h_BB) : 0.0);
  dc.sigma2_E = ch.sigma2_E;

  dc.v_A = dc.V0.adjoint() * ch.h_RA;
  dc.v_B = dc.V0.adjoint() * ch.h_RB;
  dc.v_E = dc.V0.adjoint() * ch.h_RE;
  return dc;
}

RelaySolution to_physical(const CMatrix& W, const CMatrix& Q, const DerivedConstants& dc) {
  RelaySolution sol;
  sol.W0 = (1.0 / std::sqrt(dc.zeta)) * (dc.V0 * W);
  sol.Q0 = hermitian_part(dc.V0 * Q * dc.V0.adjoint());
  return sol;
}

std::pair<CMatrix, CMatrix> to_lifted(const RelaySolution& sol, const DerivedConstants& dc) {
  CMatrix W = std::sqrt(dc.zeta) * (dc.V0.adjoint() * sol.W0);
  CMatrix Q = hermitian_part(dc.V0.adjoint() * sol.Q0 * dc.V0);
  return {std::move(W), std::move(Q)};
}

}  // namespace secrelay
