#include <benchmark/benchmark.h>

#include <cmath>

#include "gyro/freqmap.hpp"
#include "gyro/integrator.hpp"
#include "gyro/linstab.hpp"

using namespace gyro;

namespace {

const TopParams kTop{1.0, 0.0, 3.0};

void BM_TopStep(benchmark::State& state) {
  const IntegratorConfig cfg{static_cast<Scheme>(state.range(0)), 0.01};
  ReducedTopState s = torus_initial_state({0.05, 0.02, {}, {}}, kTop);
  for (auto _ : state) {
    s = step(s, kTop, cfg);
    benchmark::DoNotOptimize(s);
  }
  state.SetLabel(std::string(scheme_name(cfg.scheme)));
}
BENCHMARK(BM_TopStep)->DenseRange(0, 2);

void BM_CoupledStep(benchmark::State& state) {
  const auto n = state.range(0);
  const IntegratorConfig cfg{Scheme::Splitting2, 0.01};
  CoupledConfig cc{VecX::LinSpaced(n, 0.7, 1.9), 1e-3, {}};
  CoupledState s{torus_initial_state({0.05, 0.02, {}, {}}, kTop), VecX::Zero(n), VecX::Zero(n)};
  for (auto _ : state) {
    s = step(s, kTop, cfg, cc);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_CoupledStep)->Arg(1)->Arg(4)->Arg(16);

void BM_ClassifySpectrum(benchmark::State& state) {
  double a = 0.5;
  for (auto _ : state) {
    const auto r = classify_spectrum(linearize_at_pa({1.0, 0.0, a}));
    benchmark::DoNotOptimize(r);
    a = a < 4.0 ? a + 1e-3 : 0.5;
  }
}
BENCHMARK(BM_ClassifySpectrum);

void BM_PersistenceCell(benchmark::State& state) {
  PersistenceConfig cfg;
  cfg.window_time = 200.0;
  InitialTorus t;
  t.du1 = 0.05;
  t.du2 = 0.015;
  for (auto _ : state) benchmark::DoNotOptimize(classify_persistence(cfg, t, 1e-3));
}
BENCHMARK(BM_PersistenceCell)->Unit(benchmark::kMillisecond);

}  // namespace
