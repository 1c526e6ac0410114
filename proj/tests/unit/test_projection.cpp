#include "doctest.h"
#include "oracles/projection_dual.hpp"
#include "secrelay/projection.hpp"
#include "support.hpp"

using namespace secrelay;

TEST_CASE("water_level on small vectors") {
  RVector eta(3);
  eta << 3.0, 1.0, -2.0;
  CHECK(water_level(eta, 10.0) == 0.0);
  CHECK(water_level(eta, 4.0) == 0.0);
  CHECK(water_level(eta, 2.0) == doctest::Approx(1.0));
  CHECK(water_level(eta, 1.0) == doctest::Approx(2.0));
  CHECK(water_level(eta, 0.0) == doctest::Approx(3.0));
  RVector neg(2);
  neg << -1.0, -5.0;
  CHECK(water_level(neg, 0.0) == 0.0);
}

TEST_CASE("water_level meets the budget exactly when active") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int n = rng.uniform_int(1, 12);
    RVector eta(n);
    for (int i = 0; i < n; ++i) eta(i) = 4.0 * rng.uniform() - 1.0;
    const double budget = 3.0 * rng.uniform();
    const double nu = water_level(eta, budget);
    const double sum = (eta.array() - nu).cwiseMax(0.0).sum();
    CHECK(nu >= 0.0);
    CHECK(sum <= budget + 1e-12);
    if (nu > 0.0) CHECK(sum == doctest::Approx(budget).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("feasible inputs are returned unchanged") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const int n = rng.uniform_int(1, 6);
    const IteratePoint x = test::random_feasible(rng, n, 10.0);
    const Projection p = water_fill(x.W, x.Q, 10.0);
    CHECK(p.level == 0.0);
    CHECK((p.x - x).norm() <= 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("negative semidefinite inputs project to zero") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const int n = rng.uniform_int(1, 6);
    const CMatrix a = -test::random_psd(rng, n, n, 5.0);
    const CMatrix b = -test::random_psd(rng, n, rng.uniform_int(1, n), 2.0);
    const IteratePoint x = project_feasible(a, b, 10.0);
    CHECK(x.W.norm() <= 1e-12);
    CHECK(x.Q.norm() <= 1e-12);
  }
}

TEST_CASE("projection matches the dual oracle and satisfies KKT") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.uniform_int(1, 6);
    const double P_R = 0.5 + 10.0 * rng.uniform();
    const CMatrix M_W = test::random_hermitian(rng, n, 2.0);
    const CMatrix M_Q = test::random_hermitian(rng, n, 2.0);
    const bool an = t % 5 != 0;
    const Projection p = water_fill(M_W, M_Q, P_R, an);
    const oracle::DualPoint ref = oracle::project_by_dual(M_W, M_Q, P_R, {}, an);
    CHECK((p.x - ref.x).norm() <= 1e-6 * std::max(1.0, ref.x.norm()));
    CHECK(oracle::projection_kkt_residual(M_W, M_Q, P_R, p.x, p.level, 0.0, {}, an) <= 1e-8);
    if (!an) CHECK(p.x.Q.norm() == 0.0);
  }
}

TEST_CASE("projection is nonexpansive and idempotent") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.uniform_int(1, 5);
    const HermitianPair a{test::random_hermitian(rng, n, 3.0), test::random_hermitian(rng, n, 3.0)};
    const HermitianPair b{test::random_hermitian(rng, n, 3.0), test::random_hermitian(rng, n, 3.0)};
    const IteratePoint pa = project_feasible(a, 4.0);
    const IteratePoint pb = project_feasible(b, 4.0);
    CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
    CHECK((project_feasible(pa, 4.0) - pa).norm() <= 1e-10);
    CHECK(within_budget(pa, 4.0, 1e-12));
  }
}

TEST_CASE("projection rejects a negative budget and handles empty blocks") {
  CHECK_THROWS_AS(water_fill(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), -1.0), DomainError);
  const Projection p = water_fill(CMatrix(0, 0), CMatrix(0, 0), 1.0);
  CHECK(p.x.dim() == 0);
  const IteratePoint z = project_feasible(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), 0.0);
  CHECK(z.norm() == 0.0);
}
