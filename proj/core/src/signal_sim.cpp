#include "secrelay/signal_sim.hpp"

#include <cmath>

#include "secrelay/rng.hpp"

namespace secrelay {

namespace {

// Everything drawn for source block b.
struct BlockDraw {
  Eigen::Vector2cd s_A, s_B;
  CMatrix n_R;  // M x 2, noise on the relay slot that receives this block
  CMatrix Z;    // N x 2, AN of relay slot b
  Eigen::Vector2cd n_A, n_B, n_E;
};

BlockDraw draw_block(std::uint64_t seed, int b, const ChannelSet& ch, const CMatrix& q_root) {
  Rng rng(seed, static_cast<std::uint64_t>(b) + 1);
  BlockDraw d;
  for (int j = 0; j < 2; ++j) {
    d.s_A(j) = rng.complex_normal(ch.p_A);
    d.s_B(j) = rng.complex_normal(ch.p_B);
  }
  d.n_R = rng.complex_normal(ch.relay_rx(), 2, ch.sigma2_R);
  d.Z = q_root * rng.complex_normal(q_root.cols(), 2, 1.0);
  for (int j = 0; j < 2; ++j) {
    d.n_A(j) = rng.complex_normal(ch.sigma2_A);
    d.n_B(j) = rng.complex_normal(ch.sigma2_B);
    d.n_E(j) = rng.complex_normal(ch.sigma2_E);
  }
  return d;
}

// Square root of a PSD matrix: Q = R R^H.
CMatrix psd_root(const CMatrix& q) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(q));
  const RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.cast<Complex>().asDiagonal();
}

// Alamouti combining of a received row y = g C(u) + e with weights g (1 x 2).
Eigen::Vector2cd combine(const Eigen::RowVector2cd& g, const Eigen::RowVector2cd& y) {
  const double a = g.norm();
  if (a == 0.0) return {y(0), std::conj(y(1))};
  return {(std::conj(g(0)) * y(0) - g(1) * std::conj(y(1))) / a,
          (std::conj(g(1)) * y(0) + g(0) * std::conj(y(1))) / a};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Estimate mean_estimate(const std::vector<double>& v) {
  Estimate e;
  const double n = static_cast<double>(v.size());
  e.value = mean(v);
  if (v.size() < 2) return e;
  double ss = 0.0;
  for (double x : v) ss += (x - e.value) * (x - e.value);
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

}  // namespace

Eigen::Matrix2cd alamouti_encode(Complex s1, Complex s2) {
  Eigen::Matrix2cd c;
  c << s1, std::conj(s2), s2, -std::conj(s1);
  return c;
}

Eigen::Matrix2cd alamouti_encode(const Eigen::Vector2cd& s) { return alamouti_encode(s(0), s(1)); }

FrameStreams simulate_frames(const RelaySolution& sol, const ChannelSet& ch, const DerivedConstants& dc,
                             const FrameConfig& fc) {
  if (fc.num_blocks < 1) throw ConfigError("num_blocks must be >= 1");
  const int B = fc.num_blocks;
  const CMatrix q_root = psd_root(sol.Q0);
  const CVector f = dc.f_A + dc.f_B;
  const Complex h_AE = fc.include_direct_links ? ch.h_AE : Complex(0.0, 0.0);
  const Complex h_BE = fc.include_direct_links ? ch.h_BE : Complex(0.0, 0.0);
  const double sk_A = std::sqrt(ch.kappa_A);
  const double sk_B = std::sqrt(ch.kappa_B);

  const Eigen::RowVector2cd g_A = ch.h_RA.adjoint() * sol.W0;
  const Eigen::RowVector2cd g_B = ch.h_RB.adjoint() * sol.W0;
  const Eigen::RowVector2cd g_E = ch.h_RE.adjoint() * sol.W0;

  // Source blocks 0..B+1; relay slot j forwards block j while sources send block j+1.
  std::vector<BlockDraw> blocks;
  blocks.reserve(static_cast<std::size_t>(B) + 2);
  for (int b = 0; b <= B + 1; ++b) blocks.push_back(draw_block(fc.seed, b, ch, q_root));

  const Eigen::Index N = ch.relay_tx();
  CMatrix x_prev = CMatrix::Zero(N, 2);
  std::vector<Eigen::Vector2cd> u(static_cast<std::size_t>(B) + 1);
  std::vector<CMatrix> X(static_cast<std::size_t>(B) + 1);
  std::vector<Eigen::RowVector2cd> yE(static_cast<std::size_t>(B) + 1);

  FrameStreams st;
  st.h_AE = h_AE;
  st.h_BE = h_BE;
  const std::size_t n_samples = 2 * static_cast<std::size_t>(B);
  st.s_A.reserve(n_samples);
  st.s_B.reserve(n_samples);
  st.r_A.reserve(n_samples);
  st.r_B.reserve(n_samples);
  st.y_E.reserve(n_samples);

  for (int j = 0; j <= B; ++j) {
    const BlockDraw& cur = blocks[static_cast<std::size_t>(j)];
    const BlockDraw& next = blocks[static_cast<std::size_t>(j) + 1];
    // Block j was received during slot j-1, under that slot's residual SI.
    const CMatrix y_R = ch.h_AR * cur.s_A.transpose() + ch.h_BR * cur.s_B.transpose() + ch.H_RR * x_prev + cur.n_R;
    const Eigen::Vector2cd uj = (f.adjoint() * y_R).transpose();
    u[static_cast<std::size_t>(j)] = uj;
    const CMatrix x = sol.W0 * alamouti_encode(uj) + cur.Z;
    X[static_cast<std::size_t>(j)] = x;
    x_prev = x;

    const Eigen::RowVector2cd direct = h_AE * next.s_A.transpose() + h_BE * next.s_B.transpose();
    const Eigen::RowVector2cd eve_clean = ch.h_RE.adjoint() * x + direct;
    yE[static_cast<std::size_t>(j)] = eve_clean + cur.n_E.transpose();
    st.eve_rx_power.push_back(0.5 * eve_clean.squaredNorm());
    st.relay_power.push_back(0.5 * x.squaredNorm());

    if (j == 0) continue;

    // Alice: remove the AF copy of her own block, then combine.
    const Eigen::RowVector2cd y_A = ch.h_RA.adjoint() * x + sk_A * ch.h_AA * next.s_A.transpose() + cur.n_A.transpose();
    const Eigen::RowVector2cd self_A = g_A * alamouti_encode(dc.f_tilde_AR * cur.s_A);
    const Eigen::RowVector2cd y_B = ch.h_RB.adjoint() * x + sk_B * ch.h_BB * next.s_B.transpose() + cur.n_B.transpose();
    const Eigen::RowVector2cd self_B = g_B * alamouti_encode(dc.f_tilde_BR * cur.s_B);
    const Eigen::Vector2cd r_A = combine(g_A, y_A - self_A);
    const Eigen::Vector2cd r_B = combine(g_B, y_B - self_B);

    const Eigen::Vector2cd r_E = combine(g_E, yE[static_cast<std::size_t>(j)]);
    const Eigen::RowVector2cd& prev = yE[static_cast<std::size_t>(j) - 1];
    for (int k = 0; k < 2; ++k) {
      st.s_A.push_back(cur.s_A(k));
      st.s_B.push_back(cur.s_B(k));
      st.r_A.push_back(r_A(k));
      st.r_B.push_back(r_B(k));
      st.y_E.emplace_back(r_E(k), k == 0 ? prev(0) : prev(1));
    }
  }
  // The last relay slot only supplies the boundary transmission.
  st.relay_power.pop_back();
  st.eve_rx_power.pop_back();
  return st;
}

EveStats empirical_eve_stats(const FrameStreams& st, const RelaySolution& sol, const ChannelSet& ch,
                             const DerivedConstants& dc) {
  ChannelSet sim = ch;
  sim.h_AE = st.h_AE;
  sim.h_BE = st.h_BE;
  const EveModel m = eve_noise_cov(sol, sim, dc);
  const std::size_t n = st.size();
  EveStats es;
  es.samples = n;
  es.low_sample_warning = n < 1000;
  es.Psi_hat.setZero();
  es.Psi_se.setZero();
  es.H_E_hat.setZero();
  if (n == 0) return es;

  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2d sum_sq = Eigen::Matrix2d::Zero();
  Eigen::Matrix2cd cross = Eigen::Matrix2cd::Zero();
  Eigen::Vector2d pow = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2cd s(st.s_A[i], st.s_B[i]);
    const Eigen::Vector2cd e = st.y_E[i] - m.H_E * s;
    const Eigen::Matrix2cd outer = e * e.adjoint();
    sum += outer;
    sum_sq += outer.cwiseAbs2();
    cross += st.y_E[i] * s.adjoint();
    pow += s.cwiseAbs2();
  }
  const double dn = static_cast<double>(n);
  es.Psi_hat = sum / dn;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double second = sum_sq(a, b) / dn;
      const double first = std::norm(es.Psi_hat(a, b));
      es.Psi_se(a, b) = std::sqrt(std::max(second - first, 0.0) / dn);
    }
  for (int b = 0; b < 2; ++b) es.H_E_hat.col(b) = cross.col(b) / pow(b);
  return es;
}

Estimate empirical_sinr(const FrameStreams& st, Node node, int symbol) {
  const auto& r = node == Node::kAlice ? st.r_A : st.r_B;
  const auto& s = node == Node::kAlice ? st.s_B : st.s_A;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (symbol < 0 || static_cast<int>(i % 2) == symbol) idx.push_back(i);
  Estimate e;
  const double n = static_cast<double>(idx.size());
  if (idx.size() < 2) return e;

  Complex rs{0.0, 0.0};
  double ss = 0.0;
  double ss2 = 0.0;
  for (std::size_t i : idx) {
    rs += r[i] * std::conj(s[i]);
    ss += std::norm(s[i]);
    ss2 += std::norm(s[i]) * std::norm(s[i]);
  }
  const Complex g = rs / ss;
  const double m_s = ss / n;
  double m_e = 0.0;
  double m_e2 = 0.0;
  for (std::size_t i : idx) {
    const double p = std::norm(r[i] - g * s[i]);
    m_e += p;
    m_e2 += p * p;
  }
  m_e /= n;
  m_e2 /= n;
  const double g2 = std::norm(g);
  e.value = g2 * m_s / m_e;
  if (g2 == 0.0) return e;
  // Delta method: var|g|^2 ~ 2 |g|^2 var(g), var(g) ~ m_e / (n m_s).
  const double rel_g = 2.0 * (m_e / (n * m_s)) / g2;
  const double rel_e = std::max(m_e2 - m_e * m_e, 0.0) / n / (m_e * m_e);
  const double rel_s = std::max(ss2 / n - m_s * m_s, 0.0) / n / (m_s * m_s);
  e.std_error = e.value * std::sqrt(rel_g + rel_e + rel_s);
  return e;
}

Estimate empirical_relay_power(const FrameStreams& st) { return mean_estimate(st.relay_power); }

Estimate empirical_harvested_power(const FrameStreams& st, double tau) {
  Estimate e = mean_estimate(st.eve_rx_power);
  e.value *= tau;
  e.std_error *= tau;
  return e;
}

}  // namespace secrelay
