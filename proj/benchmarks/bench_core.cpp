#include <benchmark/benchmark.h>

#include "secrelay/channel.hpp"
#include "secrelay/eh.hpp"
#include "secrelay/projection.hpp"
#include "secrelay/rng.hpp"
#include "secrelay/solver.hpp"
#include "secrelay/surrogate.hpp"

using namespace secrelay;

namespace {

DerivedConstants paper_instance(int N, std::uint64_t seed = 1) {
  NetworkSettings s;
  s.relay_tx = N;
  s.relay_rx = 3;
  s.p_A = s.p_B = 10.0;
  s.kappa_A = s.kappa_B = 0.1;
  return derive_constants(generate_channels(seed, s));
}

CMatrix hermitian(Rng& rng, int n) {
  const CMatrix g = rng.complex_normal(n, n, 1.0);
  return 0.5 * (g + g.adjoint());
}

}  // namespace

static void BM_Projection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const CMatrix A = hermitian(rng, n), B = hermitian(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(project_feasible(A, B, 10.0));
}
BENCHMARK(BM_Projection)->Arg(2)->Arg(4)->Arg(8);

static void BM_ProjectionEh(benchmark::State& state) {
  const DerivedConstants dc = paper_instance(static_cast<int>(state.range(0)));
  const EhConfig ehc = make_eh_config(0.5, 1.0, dc);
  Rng rng(2);
  const CMatrix A = hermitian(rng, dc.dim()), B = hermitian(rng, dc.dim());
  for (auto _ : state) benchmark::DoNotOptimize(project_feasible_eh(A, B, 10.0, ehc, dc));
}
BENCHMARK(BM_ProjectionEh)->Arg(6)->Arg(8);

static void BM_SurrogateGradient(benchmark::State& state) {
  const DerivedConstants dc = paper_instance(static_cast<int>(state.range(0)));
  const IteratePoint x = default_init(dc, 10.0);
  const Surrogate s(x, dc);
  for (auto _ : state) benchmark::DoNotOptimize(s.gradient(x));
}
BENCHMARK(BM_SurrogateGradient)->Arg(4)->Arg(6)->Arg(8);

static void BM_Solve(benchmark::State& state) {
  const DerivedConstants dc = paper_instance(6, static_cast<std::uint64_t>(state.range(0)));
  SolverOptions o;
  o.record_wall_time = false;
  const IteratePoint x0 = default_init(dc, o.P_R);
  for (auto _ : state) benchmark::DoNotOptimize(inexact_mm_solve(x0, dc, o));
}
BENCHMARK(BM_Solve)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
