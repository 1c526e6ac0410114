#include "doctest.h"
#include "secrelay/projection.hpp"
#include "secrelay/purify.hpp"
#include "support.hpp"

using namespace secrelay;

namespace {

DerivedConstants constants(std::uint64_t seed, int N = 7, int M = 2, Duplex d = Duplex::kFull) {
  return derive_constants(generate_channels(seed, test::unit_network(N, M)), d);
}

}  // namespace

TEST_CASE("decompose_rank_two recovers rank-two factors") {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const int n = rng.uniform_int(1, 6);
    const CMatrix G = rng.complex_normal(n, std::min(n, 2), 1.0);
    const CMatrix Wl = G * G.adjoint();
    const CMatrix W = decompose_rank_two(Wl);
    CHECK(W.rows() == n);
    CHECK(W.cols() == 2);
    CHECK((W * W.adjoint() - Wl).norm() <= 1e-10 * Wl.norm());
  }
  CHECK(decompose_rank_two(CMatrix::Zero(3, 3)).norm() == 0.0);
  CHECK(decompose_rank_two(CMatrix(0, 0)).rows() == 0);
  CHECK_THROWS_AS(decompose_rank_two(CMatrix::Identity(3, 3)), RankExceeded);
  CMatrix nearly = CMatrix::Zero(3, 3);
  nearly(0, 0) = 1.0;
  nearly(1, 1) = 0.5;
  nearly(2, 2) = 1e-9;
  CHECK_NOTHROW(decompose_rank_two(nearly));
}

TEST_CASE("numerical rank and rank ratio") {
  CMatrix d = CMatrix::Zero(4, 4);
  d(0, 0) = 4.0;
  d(1, 1) = 2.0;
  d(2, 2) = 1.0;
  CHECK(numerical_rank(d) == 3);
  CHECK(rank_ratio(d) == doctest::Approx(0.25));
  CHECK(rank_ratio(CMatrix::Identity(2, 2)) == 0.0);
  CHECK(numerical_rank(CMatrix::Zero(3, 3)) == 0);
  CHECK(rank_ratio(CMatrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("rank reduction brings W to rank two and keeps every functional") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Duplex d = t % 3 == 2 ? Duplex::kHalf : Duplex::kFull;
    const DerivedConstants dc = constants(10 + t, 7, 2, d);
    const IteratePoint x = test::random_feasible(rng, dc.dim(), 10.0);
    REQUIRE(numerical_rank(x.W) >= 3);
    const ConstraintBundle b = ConstraintBundle::at(x, dc);
    const RankReduction r = reduce_rank(x, b);
    CHECK(r.rank_W <= 2);
    CHECK(r.steps >= 1);
    CHECK(r.steps <= 2 * dc.dim() + 2);
    CHECK(rank_ratio(r.x.W) <= 1e-6);
    CHECK(min_eigenvalue(r.x.W) >= -1e-12 * x.norm());
    CHECK(min_eigenvalue(r.x.Q) >= -1e-12 * x.norm());
    for (std::size_t i = 0; i < b.items.size(); ++i) {
      const LinearFunctional& f = b.items[i];
      const double v = f.eval(r.x);
      if (f.relaxable && r.relaxed)
        CHECK(v <= f.target + 1e-8 * std::max(1.0, std::abs(f.target)));
      else
        CHECK(v == doctest::Approx(f.target).epsilon(1e-8).scale(1.0));
    }
    CHECK(lifted_objective(r.x.W, r.x.Q, dc) ==
          doctest::Approx(lifted_objective(x.W, x.Q, dc)).epsilon(1e-8).scale(1.0));
    CHECK(r.x.trace() <= x.trace() + 1e-8);
  }
}

TEST_CASE("rank reduction of a constructed rank-three point") {
  const DerivedConstants dc = constants(3, 5, 1);
  Rng rng(3);
  const CMatrix G = rng.complex_normal(dc.dim(), 3, 1.0);
  IteratePoint x{G * G.adjoint(), test::random_psd(rng, dc.dim(), 1, 1.0)};
  x *= 8.0 / x.trace();
  REQUIRE(numerical_rank(x.W) == 3);
  const RankReduction r = reduce_rank(x, ConstraintBundle::at(x, dc));
  CHECK(r.rank_W <= 2);
  CHECK(ConstraintBundle::at(x, dc).max_violation(r.x) <= 1e-8 * x.norm());
}

TEST_CASE("points already of rank two are left alone") {
  Rng rng(4);
  const DerivedConstants dc = constants(5);
  const CMatrix G = rng.complex_normal(dc.dim(), 2, 1.0);
  const IteratePoint x{G * G.adjoint(), test::random_psd(rng, dc.dim(), dc.dim(), 1.0)};
  const RankReduction r = reduce_rank(x, ConstraintBundle::at(x, dc));
  CHECK(r.steps == 0);
  CHECK((r.x - x).norm() == 0.0);
}

TEST_CASE("purify yields a physical rank-two design with the same objective") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const DerivedConstants dc = constants(40 + t);
    const IteratePoint x = test::random_feasible(rng, dc.dim(), 10.0);
    const Purified p = purify(x, dc);
    CHECK(p.W.cols() == 2);
    CHECK(p.rank_ratio <= 1e-6);
    CHECK(p.phi == doctest::Approx(lifted_objective(x.W, x.Q, dc)).epsilon(1e-8).scale(1.0));
    CHECK(relay_power(p.physical, dc) <= 10.0 * (1.0 + 1e-8));
    CHECK((p.lifted.W - p.W * p.W.adjoint()).norm() <= 1e-12 * std::max(1.0, p.lifted.W.norm()));
  }
}

TEST_CASE("stationarity residual is zero only at stationary points") {
  const DerivedConstants dc = constants(6);
  SolverOptions o;
  o.record_wall_time = false;
  o.outer_tol = 1e-14;
  o.stationarity_tol = 1e-8;
  o.max_outer = 20000;
  o.armijo.scale_by_gradient = false;
  const SolveResult r = inexact_mm_solve(default_init(dc, o.P_R), dc, o);
  const Purified p = purify(r.x, dc);
  CHECK(stationarity_residual(p.W, p.Q, dc, o.P_R) <= 1e-5);

  const IteratePoint x0 = default_init(dc, o.P_R);
  const Purified q = purify(x0, dc);
  CHECK(stationarity_residual(q.W, q.Q, dc, o.P_R) > 1e-3);

  // Too much power or an indefinite Q is rejected.
  CHECK_THROWS_AS(stationarity_residual(2.0 * p.W, 4.0 * p.Q + CMatrix::Identity(dc.dim(), dc.dim()), dc, o.P_R),
                  InfeasiblePoint);
  CMatrix bad = p.Q;
  bad(0, 0) -= 10.0;
  CHECK_THROWS_AS(stationarity_residual(p.W, bad, dc, o.P_R), InfeasiblePoint);
}

TEST_CASE("stationarity residual without AN ignores the Q block") {
  const DerivedConstants dc = constants(7);
  SolverOptions o;
  o.record_wall_time = false;
  o.an_enabled = false;
  o.outer_tol = 1e-14;
  o.stationarity_tol = 1e-8;
  o.max_outer = 20000;
  o.armijo.scale_by_gradient = false;
  const SolveResult r = inexact_mm_solve(default_init(dc, o.P_R, false), dc, o);
  CHECK(r.x.Q.norm() == 0.0);
  const Purified p = purify(r.x, dc);
  CHECK(stationarity_residual(p.W, p.Q, dc, o.P_R, false) <= 1e-5);
  Rng rng(7);
  CHECK_THROWS_AS(stationarity_residual(p.W, test::random_psd(rng, dc.dim(), 1, 0.1), dc, o.P_R, false),
                  InfeasiblePoint);
}
