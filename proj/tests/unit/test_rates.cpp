#include <cmath>

#include "doctest.h"
#include "secrelay/channel.hpp"
#include "secrelay/rates.hpp"
#include "support.hpp"

using namespace secrelay;

namespace {

struct Instance {
  ChannelSet ch;
  DerivedConstants dc;
};

Instance instance(std::uint64_t seed, Duplex d = Duplex::kFull, int N = 6, int M = 3) {
  Instance in;
  in.ch = generate_channels(seed, test::unit_network(N, M));
  in.dc = derive_constants(in.ch, d);
  return in;
}

RelaySolution zero_solution(const ChannelSet& ch) {
  return {CMatrix::Zero(ch.relay_tx(), 2), CMatrix::Zero(ch.relay_tx(), ch.relay_tx())};
}

}  // namespace

TEST_CASE("legitimate SINR: zero beamformer and plug-in value") {
  const Instance in = instance(1);
  CHECK(sinr_legitimate(zero_solution(in.ch), in.ch, in.dc, Node::kAlice) == 0.0);
  CHECK(legitimate_rate(zero_solution(in.ch), in.ch, in.dc, Node::kBob) == 0.0);

  ChannelSet ch;
  ch.h_RA = CVector::Zero(2);
  ch.h_RA(0) = 1.0;
  ch.h_RB = ch.h_RA;
  DerivedConstants dc;
  dc.p_tilde_B = 1.0;
  dc.sigma_tilde2_R = 0.5;
  dc.c1 = 1.0;
  RelaySolution sol{CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)};
  sol.W0(0, 0) = 1.0;
  CHECK(sinr_legitimate(sol, ch, dc, Node::kAlice) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("legitimate rate is log1p of the SINR") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Instance in = instance(100 + t);
    const test::UnliftedPoint u = test::random_unlifted(rng, in.dc.dim(), 10.0);
    const RelaySolution sol = to_physical(u.W, u.Q, in.dc);
    for (Node n : {Node::kAlice, Node::kBob}) {
      const double s = sinr_legitimate(sol, in.ch, in.dc, n);
      CHECK(s >= 0.0);
      CHECK(legitimate_rate(sol, in.ch, in.dc, n) == std::log1p(s));
    }
  }
  // SINR = e - 1 gives one nat.
  CHECK(std::log1p(std::exp(1.0) - 1.0) == doctest::Approx(1.0));
}

TEST_CASE("Eve covariance at the zero solution and the diagonal identity") {
  const Instance in = instance(3);
  const EveModel m0 = eve_noise_cov(zero_solution(in.ch), in.ch, in.dc);
  CHECK(m0.Psi(0, 0) == doctest::Approx(in.ch.sigma2_E + in.dc.theta1));
  CHECK(m0.Psi(1, 1) == doctest::Approx(in.ch.sigma2_E));

  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Instance r = instance(200 + t);
    const test::UnliftedPoint u = test::random_unlifted(rng, r.dc.dim(), 10.0);
    const RelaySolution sol = to_physical(u.W, u.Q, r.dc);
    const EveModel m = eve_noise_cov(sol, r.ch, r.dc);
    CHECK(m.Psi(0, 1) == 0.0);
    CHECK(m.Psi(1, 0) == 0.0);
    CHECK(m.Psi(0, 0) > 0.0);
    CHECK(m.Psi(1, 1) > 0.0);
    const double g = (r.ch.h_RE.adjoint() * sol.W0).squaredNorm();
    const double expected = -(r.dc.p_tilde_A + r.dc.p_tilde_B) * g + r.dc.theta1;
    CHECK(m.Psi(0, 0) - m.Psi(1, 1) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("Eve sum rate: closed forms at the zero solution and both formulas agree") {
  const Instance in = instance(5);
  const RelaySolution z = zero_solution(in.ch);
  CHECK(eve_sum_rate(z, in.ch, in.dc) == doctest::Approx(std::log1p(in.dc.theta1 / in.ch.sigma2_E)));

  NetworkSettings s = test::unit_network(6, 3);
  s.variances.source_eve = 0.0;
  const ChannelSet ch = generate_channels(6, s);
  const DerivedConstants dc = derive_constants(ch);
  CHECK(std::abs(eve_sum_rate(zero_solution(ch), ch, dc)) < 1e-15);

  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const Duplex d = t % 4 == 0 ? Duplex::kHalf : Duplex::kFull;
    const Instance r = instance(300 + t, d, 4 + t % 4, 1 + t % 3);
    const test::UnliftedPoint u = test::random_unlifted(rng, r.dc.dim(), 10.0);
    const RelaySolution sol = to_physical(u.W, u.Q, r.dc);
    const double det = eve_sum_rate_determinant(sol, r.ch, r.dc);
    CHECK(eve_sum_rate(sol, r.ch, r.dc) == doctest::Approx(det).epsilon(1e-9));
  }
}

TEST_CASE("sum secrecy rate: zero solution and lifted agreement") {
  const Instance in = instance(8);
  const RelaySolution z = zero_solution(in.ch);
  const double r0 = sum_secrecy_rate(z, in.ch, in.dc);
  CHECK(r0 <= 0.0);
  CHECK(r0 == doctest::Approx(-std::log1p(in.dc.theta1 / in.ch.sigma2_E)));

  NetworkSettings s = test::unit_network(6, 3);
  s.variances.source_eve = 0.0;
  const ChannelSet ch = generate_channels(9, s);
  CHECK(sum_secrecy_rate(zero_solution(ch), ch, derive_constants(ch)) == 0.0);

  Rng rng(10);
  for (int t = 0; t < 500; ++t) {
    const Duplex d = t % 3 == 0 ? Duplex::kHalf : Duplex::kFull;
    const Instance r = instance(400 + t, d);
    const test::UnliftedPoint u = test::random_unlifted(rng, r.dc.dim(), 10.0);
    const RelaySolution sol = to_physical(u.W, u.Q, r.dc);
    const double phi = lifted_objective(u.W * u.W.adjoint(), u.Q, r.dc);
    CHECK(sum_secrecy_rate(sol, r.ch, r.dc) == doctest::Approx(phi).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("relay power") {
  const Instance in = instance(11);
  CHECK(relay_power(zero_solution(in.ch), in.dc) == 0.0);

  DerivedConstants dc;
  dc.zeta = 2.0;
  RelaySolution sol{CMatrix::Zero(3, 2), CMatrix::Zero(3, 3)};
  sol.W0(0, 0) = 1.0;
  sol.Q0(1, 1) = 3.0;
  CHECK(relay_power(sol, dc) == doctest::Approx(5.0));

  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const IteratePoint x = test::random_feasible(rng, in.dc.dim(), 10.0);
    const test::UnliftedPoint u = test::random_unlifted(rng, in.dc.dim(), 10.0);
    const RelaySolution s = to_physical(u.W, x.Q, in.dc);
    CHECK(relay_power(s, in.dc) == doctest::Approx(u.W.squaredNorm() + x.Q.trace().real()).epsilon(1e-10));
  }
}

TEST_CASE("harvested power") {
  const Instance in = instance(13);
  CHECK(harvested_power(zero_solution(in.ch), in.ch, in.dc, 0.1) == doctest::Approx(0.1 * in.dc.theta1));
  CHECK_THROWS_AS(harvested_power(zero_solution(in.ch), in.ch, in.dc, 0.0), DomainError);
  CHECK_THROWS_AS(harvested_power(zero_solution(in.ch), in.ch, in.dc, 1.5), DomainError);
  Rng rng(14);
  const test::UnliftedPoint u = test::random_unlifted(rng, in.dc.dim(), 10.0);
  const RelaySolution sol = to_physical(u.W, u.Q, in.dc);
  const CMatrix cov = in.dc.zeta * sol.W0 * sol.W0.adjoint() + sol.Q0;
  CHECK(harvested_power(sol, in.ch, in.dc, 0.3) ==
        doctest::Approx(0.3 * (quad(in.ch.h_RE, cov) + in.dc.theta1)).epsilon(1e-12));
}

TEST_CASE("functionals: zero point and physical recomputation") {
  const Instance in = instance(15);
  const Eigen::Index n = in.dc.dim();
  const FunctionalValues f0 = functionals(CMatrix::Zero(n, n), CMatrix::Zero(n, n), in.dc);
  CHECK(f0.alpha[0] == 0.0);
  CHECK(f0.alpha[1] == 0.0);
  CHECK(f0.beta[0] == 0.0);
  CHECK(f0.beta[1] == 0.0);
  CHECK(f0.psi[0] == doctest::Approx(in.ch.sigma2_E + in.dc.theta1));
  CHECK(f0.psi[1] == doctest::Approx(in.ch.sigma2_E));

  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    const test::UnliftedPoint u = test::random_unlifted(rng, n, 10.0);
    const CMatrix Wl = u.W * u.W.adjoint();
    const FunctionalValues f = functionals(Wl, u.Q, in.dc);
    const RelaySolution sol = to_physical(u.W, u.Q, in.dc);
    const double gA = (in.ch.h_RA.adjoint() * sol.W0).squaredNorm();
    const double gB = (in.ch.h_RB.adjoint() * sol.W0).squaredNorm();
    const double alpha1 = (in.dc.p_tilde_B + in.dc.sigma_tilde2_R) * gA + quad(in.ch.h_RA, sol.Q0);
    CHECK(f.alpha[0] == doctest::Approx(alpha1).epsilon(1e-9));
    // alpha_i - beta_i is the useful-signal trace term only.
    CHECK(f.alpha[0] - f.beta[0] == doctest::Approx(in.dc.p_tilde_B * gA).epsilon(1e-9));
    CHECK(f.alpha[1] - f.beta[1] == doctest::Approx(in.dc.p_tilde_A * gB).epsilon(1e-9));
    CHECK(f.alpha[0] >= f.beta[0]);
    CHECK(f.beta[0] >= 0.0);
    CHECK(f.psi[0] > 0.0);
    CHECK(f.psi[1] > 0.0);
    CHECK(f.w_energy >= 0.0);
  }
}

TEST_CASE("lifted objective: zero point, continuity, and domain") {
  const Instance in = instance(17);
  const Eigen::Index n = in.dc.dim();
  const double phi0 = lifted_objective(CMatrix::Zero(n, n), CMatrix::Zero(n, n), in.dc);
  CHECK(phi0 == doctest::Approx(-std::log1p(in.dc.theta1 / in.ch.sigma2_E)));

  Rng rng(18);
  const IteratePoint x = test::random_feasible(rng, n, 10.0);
  double prev = std::abs(lifted_objective(x.W, x.Q, in.dc) - phi0);
  for (double t = 1e-1; t > 1e-9; t *= 1e-2) {
    const double gap = std::abs(lifted_objective(t * x.W, t * x.Q, in.dc) - phi0);
    CHECK(gap <= prev + 1e-15);
    prev = gap;
  }
  CHECK(prev < 1e-7);

  CMatrix bad = x.W;
  bad(0, 1) += Complex(0.0, 1.0);
  CHECK_THROWS_AS(lifted_objective(bad, x.Q, in.dc), DomainError);
}

TEST_CASE("jamming along Eve's private direction never lowers the secrecy rate") {
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    const Instance in = instance(500 + t, Duplex::kFull, 7, 2);
    const Eigen::Index n = in.dc.dim();
    REQUIRE(n >= 3);
    CMatrix basis(n, 2);
    basis << in.dc.v_A, in.dc.v_B;
    const Eigen::HouseholderQR<CMatrix> qr(basis);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, 2);
    CVector u = in.dc.v_E - q * (q.adjoint() * in.dc.v_E);
    u.normalize();
    const test::UnliftedPoint p = test::random_unlifted(rng, n, 5.0);
    double prev = -1e300;
    for (double s = 0.0; s <= 5.0; s += 0.5) {
      const RelaySolution sol = to_physical(p.W, p.Q + s * u * u.adjoint(), in.dc);
      const double r = sum_secrecy_rate(sol, in.ch, in.dc);
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("f and g1 are concave (midpoint test)") {
  Rng rng(20);
  const Instance in = instance(21);
  const Eigen::Index n = in.dc.dim();
  const double c[2] = {in.dc.c1, in.dc.c2};
  auto f = [&](const IteratePoint& x) {
    const FunctionalValues v = functionals(x.W, x.Q, in.dc);
    return std::log(c[0] + v.alpha[0]) + std::log(c[1] + v.alpha[1]) + std::log(v.psi[0]) + std::log(v.psi[1]);
  };
  auto g1 = [&](const IteratePoint& x) {
    const FunctionalValues v = functionals(x.W, x.Q, in.dc);
    return std::log(c[0] + v.beta[0]) + std::log(c[1] + v.beta[1]);
  };
  for (int t = 0; t < 1000; ++t) {
    const IteratePoint a = test::random_feasible(rng, n, 10.0);
    const IteratePoint b = test::random_feasible(rng, n, 10.0);
    const IteratePoint m = 0.5 * (a + b);
    CHECK(f(m) >= 0.5 * (f(a) + f(b)) - 1e-12);
    CHECK(g1(m) >= 0.5 * (g1(a) + g1(b)) - 1e-12);
  }
}

TEST_CASE("half duplex: no direct links and no AN reduces to half the plain rate difference") {
  NetworkSettings s = test::unit_network(4, 2);
  s.variances.source_eve = 0.0;
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const ChannelSet ch = generate_channels(600 + t, s);
    const DerivedConstants dc = derive_constants(ch, Duplex::kHalf);
    CMatrix W = rng.complex_normal(4, 2, 1.0);
    const RelaySolution sol = to_physical(W, CMatrix::Zero(4, 4), dc);
    // Without direct links Eve sees one relayed stream per slot pair: log(1 + SINR_E).
    const double gE = (ch.h_RE.adjoint() * sol.W0).squaredNorm();
    const double sinrE = (dc.p_tilde_A + dc.p_tilde_B) * gE / (dc.sigma_tilde2_R * gE + ch.sigma2_E);
    const double direct = 0.5 * (legitimate_rate(sol, ch, dc, Node::kAlice) +
                                 legitimate_rate(sol, ch, dc, Node::kBob) - std::log1p(sinrE));
    CHECK(sum_secrecy_rate(sol, ch, dc) == doctest::Approx(direct).epsilon(1e-10));
    CHECK(sum_secrecy_rate(zero_solution(ch), ch, dc) <= 0.0);
  }
}
