#include "secrelay/purify.hpp"

#include <algorithm>
#include <cmath>

#include "secrelay/projection.hpp"
#include "secrelay/surrogate.hpp"

namespace secrelay {

namespace {

constexpr double kSupportTol = 1e-12;

CMatrix outer(const CVector& v) { return v * v.adjoint(); }

LinearFunctional make(std::string name, CMatrix aw, CMatrix aq, const IteratePoint& anchor, bool relaxable = false) {
  LinearFunctional f{std::move(name), std::move(aw), std::move(aq), 0.0, relaxable};
  f.target = f.eval(anchor);
  return f;
}

// Orthonormal basis of the range of a PSD block and the matching eigenvalues.
struct Support {
  CMatrix U;
  RVector lambda;
};

Support support(const CMatrix& a, double threshold) {
  Support s;
  const Eigen::Index n = a.rows();
  if (n == 0) {
    s.U = CMatrix::Zero(0, 0);
    s.lambda = RVector::Zero(0);
    return s;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > threshold) keep.push_back(i);
  s.U.resize(n, static_cast<Eigen::Index>(keep.size()));
  s.lambda.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    s.U.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
    s.lambda(static_cast<Eigen::Index>(j)) = es.eigenvalues()(keep[j]);
  }
  return s;
}

// Real coordinates of an r x r Hermitian matrix: r diagonal entries, then
// (Re, Im) of each strictly upper entry.
CMatrix hermitian_from(const RVector& c, Eigen::Index offset, Eigen::Index r) {
  CMatrix x = CMatrix::Zero(r, r);
  Eigen::Index k = offset;
  for (Eigen::Index i = 0; i < r; ++i) x(i, i) = c(k++);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i + 1; j < r; ++j) {
      const Complex z(c(k), c(k + 1));
      k += 2;
      x(i, j) = z;
      x(j, i) = std::conj(z);
    }
  return x;
}

// <A, X> for every basis Hermitian X in the coordinates above, A Hermitian.
void fill_row(const CMatrix& a, Eigen::Index r, Eigen::Ref<RVector> row) {
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < r; ++i) row(k++) = a(i, i).real();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i + 1; j < r; ++j) {
      // X = z e_i e_j^T + conj(z) e_j e_i^T: <A, X> = 2 Re(conj(A_ij) z).
      row(k++) = 2.0 * a(i, j).real();
      row(k++) = 2.0 * a(i, j).imag();
    }
}

// Null vectors of C (columns), by SVD.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& C, double tol) {
  const Eigen::Index cols = C.cols();
  if (C.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, smax)) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

// Eigenvalues of L^{-1/2} X L^{-1/2}.
RVector relative_eigs(const CMatrix& x, const RVector& lambda) {
  if (lambda.size() == 0) return RVector::Zero(0);
  const RVector inv = lambda.array().rsqrt();
  const CMatrix s = inv.cast<Complex>().asDiagonal() * x * inv.cast<Complex>().asDiagonal();
  return Eigen::SelfAdjointEigenSolver<CMatrix>(hermitian_part(s), Eigen::EigenvaluesOnly).eigenvalues();
}

CMatrix psd_clip(const CMatrix& a) {
  if (a.rows() == 0) return a;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  const RVector lam = es.eigenvalues().cwiseMax(0.0);
  return hermitian_part(es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
}

}  // namespace

ConstraintBundle ConstraintBundle::at(const IteratePoint& anchor, const DerivedConstants& dc) {
  const Eigen::Index n = dc.dim();
  const double z = 1.0 / dc.zeta;
  const double sr = dc.sigma_tilde2_R;
  const CMatrix aa = outer(dc.v_A);
  const CMatrix bb = outer(dc.v_B);
  const CMatrix ee = outer(dc.v_E);
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix zero = CMatrix::Zero(n, n);
  ConstraintBundle b;
  b.items.push_back(make("alpha_1", z * (sr + dc.p_tilde_B) * aa, aa, anchor));
  b.items.push_back(make("alpha_2", z * (sr + dc.p_tilde_A) * bb, bb, anchor));
  b.items.push_back(make("beta_1", z * sr * aa, aa, anchor));
  b.items.push_back(make("beta_2", z * sr * bb, bb, anchor));
  b.items.push_back(make("psi_1", z * sr * ee, ee, anchor));
  if (dc.duplex == Duplex::kFull)
    b.items.push_back(make("psi_2", ee, ee, anchor));
  else
    b.items.push_back(make("psi_2", zero, zero, anchor));
  b.items.push_back(make("w_energy", ee, zero, anchor));
  b.items.push_back(make("trace", id, id, anchor, true));
  return b;
}

ConstraintBundle ConstraintBundle::at_eh(const IteratePoint& anchor, const DerivedConstants& dc,
                                         const EhConfig& ehc) {
  ConstraintBundle b = at(anchor, dc);
  const CMatrix ee = ehc.tau * outer(dc.v_E);
  b.items.push_back(make("harvest", ee, ee, anchor));
  return b;
}

std::vector<double> ConstraintBundle::values(const IteratePoint& x) const {
  std::vector<double> v;
  v.reserve(items.size());
  for (const auto& f : items) v.push_back(f.eval(x));
  return v;
}

double ConstraintBundle::max_violation(const IteratePoint& x) const {
  double m = 0.0;
  for (const auto& f : items) m = std::max(m, std::abs(f.eval(x) - f.target));
  return m;
}

RankReduction reduce_rank(const IteratePoint& anchor, const ConstraintBundle& bundle, int target_rank_W,
                          double null_tol) {
  RankReduction out;
  out.x = anchor;
  const Eigen::Index n = anchor.dim();
  const int max_steps = static_cast<int>(2 * n + 2);

  for (;;) {
    const double scale = std::max(out.x.W.norm(), out.x.Q.norm());
    const double threshold = kSupportTol * std::max(scale, 1e-300);
    const Support sw = support(out.x.W, threshold);
    const Support sq = support(out.x.Q, threshold);
    const Eigen::Index rw = sw.lambda.size();
    const Eigen::Index rq = sq.lambda.size();
    out.rank_W = static_cast<int>(rw);
    out.rank_Q = static_cast<int>(rq);
    if (rw <= target_rank_W || out.steps >= max_steps) break;

    const Eigen::Index pw = rw * rw;
    const Eigen::Index dim = pw + rq * rq;
    const auto m = static_cast<Eigen::Index>(bundle.items.size());
    Eigen::MatrixXd C(m, dim);
    for (Eigen::Index i = 0; i < m; ++i) {
      const LinearFunctional& f = bundle.items[static_cast<std::size_t>(i)];
      RVector row(dim);
      fill_row(hermitian_part(sw.U.adjoint() * f.A_W * sw.U), rw, row.head(pw));
      fill_row(hermitian_part(sq.U.adjoint() * f.A_Q * sq.U), rq, row.tail(rq * rq));
      C.row(i) = row.transpose();
    }

    Eigen::MatrixXd N = null_space(C, null_tol);
    bool relaxed = false;
    RVector relaxed_row;
    if (N.cols() == 0) {
      // Keep only the non-relaxable functionals; relaxable ones may not increase.
      std::vector<Eigen::Index> strict;
      for (Eigen::Index i = 0; i < m; ++i)
        if (!bundle.items[static_cast<std::size_t>(i)].relaxable) strict.push_back(i);
      if (static_cast<Eigen::Index>(strict.size()) == m) break;
      Eigen::MatrixXd Cs(static_cast<Eigen::Index>(strict.size()), dim);
      for (std::size_t i = 0; i < strict.size(); ++i) Cs.row(static_cast<Eigen::Index>(i)) = C.row(strict[i]);
      N = null_space(Cs, null_tol);
      if (N.cols() == 0) break;
      relaxed = true;
      relaxed_row = RVector::Zero(dim);
      for (Eigen::Index i = 0; i < m; ++i)
        if (bundle.items[static_cast<std::size_t>(i)].relaxable) relaxed_row += C.row(i).transpose();
    }

    const RVector c = N.col(N.cols() - 1);
    const CMatrix xw = hermitian_from(c, 0, rw);
    const CMatrix xq = hermitian_from(c, pw, rq);
    const RVector ow = relative_eigs(xw, sw.lambda);
    const RVector oq = relative_eigs(xq, sq.lambda);
    double omax = ow.maxCoeff();
    double omin = ow.minCoeff();
    if (rq > 0) {
      omax = std::max(omax, oq.maxCoeff());
      omin = std::min(omin, oq.minCoeff());
    }

    double t;
    if (relaxed) {
      // Step sign chosen so the relaxable functionals do not increase.
      const double drift = relaxed_row.dot(c);
      const bool backward = drift > 0.0 || (drift == 0.0 && omax >= -omin);
      if (backward ? !(omax > 0.0) : !(omin < 0.0)) break;
      t = backward ? -1.0 / omax : -1.0 / omin;
      out.relaxed = true;
    } else {
      t = omax >= -omin ? -1.0 / omax : -1.0 / omin;
    }

    const CMatrix lw = sw.lambda.cast<Complex>().asDiagonal();
    out.x.W = hermitian_part(sw.U * (lw + t * xw) * sw.U.adjoint());
    if (rq > 0) {
      const CMatrix lq = sq.lambda.cast<Complex>().asDiagonal();
      out.x.Q = hermitian_part(sq.U * (lq + t * xq) * sq.U.adjoint());
    } else {
      out.x.Q = CMatrix::Zero(n, n);
    }
    ++out.steps;
  }

  if (out.steps > 0) {
    out.x.W = psd_clip(out.x.W);
    out.x.Q = psd_clip(out.x.Q);
  }
  return out;
}

IteratePoint rank_reduce(const IteratePoint& anchor, const DerivedConstants& dc) {
  return reduce_rank(anchor, ConstraintBundle::at(anchor, dc)).x;
}

IteratePoint rank_reduce_eh(const IteratePoint& anchor, const DerivedConstants& dc, const EhConfig& ehc) {
  RankReduction r = reduce_rank(anchor, ConstraintBundle::at_eh(anchor, dc, ehc));
  if (r.rank_W > 2) throw RankExceeded("EH rank reduction left rank(W) > 2");
  return r.x;
}

int numerical_rank(const CMatrix& a, double rel_tol) {
  if (a.rows() == 0) return 0;
  const RVector ev =
      Eigen::SelfAdjointEigenSolver<CMatrix>(hermitian_part(a), Eigen::EigenvaluesOnly).eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * top) ++r;
  return r;
}

double rank_ratio(const CMatrix& a) {
  if (a.rows() < 3) return 0.0;
  RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(hermitian_part(a), Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::Index n = ev.size();
  const double l1 = ev(n - 1);
  if (l1 <= 0.0) return 0.0;
  return std::max(ev(n - 3), 0.0) / l1;
}

CMatrix decompose_rank_two(const CMatrix& Wl, double tol) {
  const Eigen::Index n = Wl.rows();
  CMatrix W = CMatrix::Zero(n, 2);
  if (n == 0) return W;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(Wl));
  const RVector& ev = es.eigenvalues();
  const double l1 = std::max(ev(n - 1), 0.0);
  if (n >= 3 && ev(n - 3) > tol * l1) throw RankExceeded("matrix has numerical rank above two");
  W.col(0) = std::sqrt(l1) * es.eigenvectors().col(n - 1);
  if (n >= 2) W.col(1) = std::sqrt(std::max(ev(n - 2), 0.0)) * es.eigenvectors().col(n - 2);
  return W;
}

double stationarity_residual(const CMatrix& W, const CMatrix& Q, const DerivedConstants& dc, double P_R,
                             bool an_enabled) {
  if (W.rows() != dc.dim() || Q.rows() != dc.dim()) throw InfeasiblePoint("dimension mismatch");
  const double scale = std::max(1.0, P_R);
  if (!is_hermitian(Q, 1e-8) || min_eigenvalue(Q) < -1e-8 * scale ||
      W.squaredNorm() + Q.trace().real() > P_R + 1e-8 * scale)
    throw InfeasiblePoint("point violates the power or PSD constraints (power " +
                          std::to_string(W.squaredNorm() + Q.trace().real()) + ", min eig Q " +
                          std::to_string(min_eigenvalue(Q)) + ")");

  IteratePoint lifted{W * W.adjoint(), hermitian_part(Q)};
  const HermitianPair g = objective_gradient(lifted, dc);
  const CMatrix a = W + 2.0 * g.W * W;
  const CMatrix b = hermitian_part(lifted.Q + g.Q);

  // Projection onto {||W||^2 + Tr Q <= P_R, Q >= 0}: W / (1 + 2 nu), eig(Q) - nu clipped.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(b);
  const RVector eta = an_enabled ? RVector(es.eigenvalues()) : RVector::Constant(b.rows(), -1.0);
  const double aa = a.squaredNorm();
  auto used = [&](double nu) {
    double s = aa / ((1.0 + 2.0 * nu) * (1.0 + 2.0 * nu));
    for (Eigen::Index i = 0; i < eta.size(); ++i) s += std::max(eta(i) - nu, 0.0);
    return s;
  };
  double nu = 0.0;
  if (used(0.0) > P_R) {
    double lo = 0.0;
    double hi = 1.0;
    while (used(hi) > P_R) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (used(mid) > P_R ? lo : hi) = mid;
    }
    nu = hi;
  }
  const CMatrix wp = a / (1.0 + 2.0 * nu);
  const RVector lam = (eta.array() - nu).cwiseMax(0.0);
  const CMatrix qp = es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  if (!an_enabled && lifted.Q.norm() > 0.0) throw InfeasiblePoint("AN disabled but Q is nonzero");
  return std::sqrt((wp - W).squaredNorm() + (qp - lifted.Q).squaredNorm());
}

double stationarity_residual_eh(const CMatrix& W, const CMatrix& Q, const DerivedConstants& dc, double P_R,
                                const EhConfig& ehc, bool an_enabled) {
  IteratePoint x{W * W.adjoint(), hermitian_part(Q)};
  if (!within_budget(x, P_R, 1e-8) || eh_slack(x, ehc, dc) < -1e-8 * std::max(1.0, std::abs(ehc.epsilon_tilde)))
    throw InfeasiblePoint("point violates the power, PSD or harvesting constraints");
  const HermitianPair g = objective_gradient(x, dc);
  return gradient_mapping(x, g, eh_projector(P_R, ehc, dc, an_enabled)).norm;
}

namespace {

Purified finish(IteratePoint reduced, int steps, const DerivedConstants& dc) {
  Purified p;
  p.rank_ratio = rank_ratio(reduced.W);
  p.W = decompose_rank_two(reduced.W);
  p.Q = reduced.Q;
  p.lifted = IteratePoint{p.W * p.W.adjoint(), reduced.Q};
  p.physical = to_physical(p.W, p.Q, dc);
  p.phi = lifted_objective(p.lifted.W, p.lifted.Q, dc);
  p.steps = steps;
  return p;
}

}  // namespace

Purified purify(const IteratePoint& limit, const DerivedConstants& dc) {
  RankReduction r = reduce_rank(limit, ConstraintBundle::at(limit, dc));
  return finish(std::move(r.x), r.steps, dc);
}

Purified purify_eh(const IteratePoint& limit, const DerivedConstants& dc, const EhConfig& ehc) {
  RankReduction r = reduce_rank(limit, ConstraintBundle::at_eh(limit, dc, ehc));
  if (r.rank_W > 2) throw RankExceeded("EH rank reduction left rank(W) > 2");
  return finish(std::move(r.x), r.steps, dc);
}

}  // namespace secrelay
