#pragma once

#include <cmath>

#include "secrelay/channel.hpp"
#include "secrelay/lifted.hpp"
#include "secrelay/rng.hpp"

namespace secrelay::test {

inline CMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0) {
  return hermitian_part(rng.complex_normal(n, n, scale));
}

/// Random PSD matrix of the given rank (trace normalized to `trace`).
inline CMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank, double trace = 1.0) {
  if (rank == 0 || n == 0) return CMatrix::Zero(n, n);
  const CMatrix g = rng.complex_normal(n, rank, 1.0);
  CMatrix a = g * g.adjoint();
  return a * (trace / a.trace().real());
}

/// Random full-rank feasible point using a fraction in (0.05, 1] of the budget.
inline IteratePoint random_feasible(Rng& rng, Eigen::Index n, double P_R) {
  const double total = P_R * (0.05 + 0.95 * rng.uniform());
  const double split = rng.uniform();
  return {random_psd(rng, n, n, split * total), random_psd(rng, n, n, (1.0 - split) * total)};
}

inline NetworkSettings unit_network(int N, int M, double p = 10.0, double kappa = 0.1) {
  NetworkSettings s;
  s.relay_tx = N;
  s.relay_rx = M;
  s.p_A = s.p_B = p;
  s.kappa_A = s.kappa_B = kappa;
  return s;
}

/// Rank-two lifted beamformer W ((n x 2)) and AN covariance with total power P_R * frac.
struct UnliftedPoint {
  CMatrix W;
  CMatrix Q;
};

inline UnliftedPoint random_unlifted(Rng& rng, Eigen::Index n, double P_R) {
  UnliftedPoint u;
  u.W = rng.complex_normal(n, 2, 1.0);
  u.Q = random_psd(rng, n, std::max<Eigen::Index>(1, n / 2), 1.0);
  const double total = P_R * (0.1 + 0.9 * rng.uniform());
  const double split = 0.2 + 0.6 * rng.uniform();
  u.W *= std::sqrt(split * total / u.W.squaredNorm());
  u.Q *= (1.0 - split) * total / u.Q.trace().real();
  return u;
}

}  // namespace secrelay::test
