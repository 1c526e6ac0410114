#include "secrelay/projection.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace secrelay {

namespace {

double clipped_sum(const RVector& eta, double nu) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) s += std::max(eta(i) - nu, 0.0);
  return s;
}

CMatrix rebuild(const Eigen::SelfAdjointEigenSolver<CMatrix>& es, double nu) {
  const RVector lam = (es.eigenvalues().array() - nu).cwiseMax(0.0);
  const CMatrix& u = es.eigenvectors();
  return hermitian_part(u * lam.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace

double water_level(const RVector& eta, double budget) {
  if (clipped_sum(eta, 0.0) <= budget) return 0.0;
  std::vector<double> v(eta.data(), eta.data() + eta.size());
  std::sort(v.begin(), v.end(), std::greater<>());
  double top = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    top += v[k];
    const double nu = (top - budget) / static_cast<double>(k + 1);
    const double lower = k + 1 < v.size() ? std::max(v[k + 1], 0.0) : 0.0;
    if (nu >= lower && nu <= v[k]) return nu;
  }
  double lo = 0.0;
  double hi = v.front();
  const double tol = 1e-12 * std::max(budget, 1e-300);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (clipped_sum(eta, mid) > budget)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

Projection water_fill(const CMatrix& M_W, const CMatrix& M_Q, double P_R, bool an_enabled) {
  if (!(P_R >= 0.0)) throw DomainError("relay power budget must be nonnegative");
  const Eigen::Index n = M_W.rows();
  Projection out;
  if (n == 0) {
    out.x = IteratePoint::zero(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> ew(hermitian_part(M_W));
  if (!an_enabled) {
    out.level = water_level(ew.eigenvalues(), P_R);
    out.x.W = rebuild(ew, out.level);
    out.x.Q = CMatrix::Zero(n, n);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eq(hermitian_part(M_Q));
  RVector pooled(2 * n);
  pooled << ew.eigenvalues(), eq.eigenvalues();
  out.level = water_level(pooled, P_R);
  out.x.W = rebuild(ew, out.level);
  out.x.Q = rebuild(eq, out.level);
  return out;
}

}  // namespace secrelay
