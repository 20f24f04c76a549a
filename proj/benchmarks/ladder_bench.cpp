#include <benchmark/benchmark.h>

#include "ladder/floquet.hpp"
#include "ladder/linalg.hpp"
#include "ladder/models.hpp"
#include "ladder/observables.hpp"
#include "ladder/rgflow.hpp"

using namespace ladder;

static void BM_LadderBasis(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_ladder_basis(L, L / 2));
}
BENCHMARK(BM_LadderBasis)->Arg(6)->Arg(8)->Arg(10);

static void BM_BuildHamiltonian(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto basis = make_ladder_basis(L, L / 2);
  const auto terms = h_eff_pulse({1.0, -1.5, L, Boundary::open}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(build_sparse(terms, basis));
}
BENCHMARK(BM_BuildHamiltonian)->Arg(6)->Arg(8);

static void BM_GroundState(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto h = build_sparse(h_eff_pulse({1.0, -1.5, L, Boundary::open}, 0.5), make_ladder_basis(L, L / 2, 1));
  for (auto _ : state) benchmark::DoNotOptimize(ground_states(h, 2));
}
BENCHMARK(BM_GroundState)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_KrylovStep(benchmark::State& state) {
  const int L = 8;
  const auto h = build_sparse(h0({1.0, -0.7, L, Boundary::open}), make_ladder_basis(L, 4));
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(h.dim()));
  psi(0) = 1.0;
  for (auto _ : state) {
    psi = krylov_step(h.matrix, psi, 0.05);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_KrylovStep)->Unit(benchmark::kMicrosecond);

static void BM_PulsePeriodUnitary(benchmark::State& state) {
  PropagationPlan p;
  p.scheme = Scheme::pulse_sequence;
  p.model = {1.0, -0.7, 4, Boundary::open};
  p.drive.alpha = 1.0 / 3;
  p.drive.T = 0.2;
  const auto basis = make_ladder_basis(4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(period_unitary(p, basis));
}
BENCHMARK(BM_PulsePeriodUnitary)->Unit(benchmark::kMillisecond);

static void BM_RgScan(benchmark::State& state) {
  ScanRequest rq;
  for (int i = 0; i < 10; ++i) {
    rq.U0.push_back(-1.5 + 0.15 * i);
    rq.alpha.push_back(0.05 + 0.1 * i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(phase_scan(rq, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RgScan)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
