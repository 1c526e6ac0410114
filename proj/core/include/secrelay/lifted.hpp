#pragma once

#include <cmath>

#include "secrelay/types.hpp"

namespace secrelay {

/// A pair of (N - r) x (N - r) Hermitian blocks: the lifted beamformer
/// covariance W = W W^H and the AN covariance Q. Also used for gradients
/// and search directions, which live in the same space.
struct MatrixPair {
  CMatrix W;
  CMatrix Q;

  static MatrixPair zero(Eigen::Index n) {
    return {CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  }

  Eigen::Index dim() const { return W.rows(); }

  double trace() const { return W.trace().real() + Q.trace().real(); }

  double squared_norm() const { return W.squaredNorm() + Q.squaredNorm(); }
  double norm() const { return std::sqrt(squared_norm()); }

  MatrixPair& operator+=(const MatrixPair& o) {
    W += o.W;
    Q += o.Q;
    return *this;
  }
  MatrixPair& operator-=(const MatrixPair& o) {
    W -= o.W;
    Q -= o.Q;
    return *this;
  }
  MatrixPair& operator*=(double s) {
    W *= s;
    Q *= s;
    return *this;
  }
};

inline MatrixPair operator+(MatrixPair a, const MatrixPair& b) { return a += b; }
inline MatrixPair operator-(MatrixPair a, const MatrixPair& b) { return a -= b; }
inline MatrixPair operator*(double s, MatrixPair a) { return a *= s; }

inline double inner(const MatrixPair& a, const MatrixPair& b) {
  return inner(a.W, b.W) + inner(a.Q, b.Q);
}

using IteratePoint = MatrixPair;
using HermitianPair = MatrixPair;

inline double min_eigenvalue(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline bool is_hermitian(const CMatrix& a, double tol = 1e-10) {
  return a.rows() == a.cols() &&
         (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

/// PSD blocks (within tol, relative to the block scale) and inside the trace budget.
inline bool within_budget(const IteratePoint& x, double P_R, double tol = 1e-8) {
  const double scale = std::max(1.0, P_R);
  return min_eigenvalue(x.W) >= -tol * scale && min_eigenvalue(x.Q) >= -tol * scale &&
         x.trace() <= P_R + tol * scale;
}

}  // namespace secrelay
