#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "gyro/dioph.hpp"
#include "gyro/freqmap.hpp"
#include "gyro/monodromy.hpp"
#include "gyro/normalform.hpp"

using namespace gyro;

namespace {

void BM_NaffExtract(benchmark::State& state) {
  TimeSeries ts;
  ts.dt = 0.5;
  const auto n = state.range(0);
  for (int k = 0; k < n; ++k) {
    const double t = k * ts.dt;
    ts.samples.push_back(std::polar(1.0, 0.7 * t) + std::polar(0.6, 0.99 * t) + std::polar(0.35, -1.13 * t));
  }
  for (auto _ : state) benchmark::DoNotOptimize(naff_extract(ts, 6, 1e-12));
}
BENCHMARK(BM_NaffExtract)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_DiophantineCheck(benchmark::State& state) {
  const auto f = unfolding_frequency_model(Eigen::Vector2d((1 + std::sqrt(5.0)) / 2, 0.2));
  const DiophParams p{2.0, 1e-6, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(diophantine_check(f, p));
}
BENCHMARK(BM_DiophantineCheck)->Arg(10)->Arg(50)->Arg(200);

void BM_BirkhoffNormalize(benchmark::State& state) {
  NormalFormCoefficients c;
  c.mu1 = 0.02;
  c.mu2 = -0.35;
  c.b = 0.8;
  c.c1 = -0.3;
  c.c2 = 0.25;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  PolyHamiltonian w;
  for (int idx : indices_of_degree(3)) w[idx] = u(rng);
  const PolyHamiltonian h = lie_transform(gint_polynomial(c), w);
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_normalize(h, {c.lambda0, c.mu1, c.mu2}));
}
BENCHMARK(BM_BirkhoffNormalize)->Unit(benchmark::kMicrosecond);

NormalFormCoefficients thread_coefficients() {
  NormalFormCoefficients c;
  c.mu2 = -1.0;
  c.b = 1.0;
  c.c1 = 0.1;
  c.c2 = 0.05;
  return c;
}

void BM_RotationNumber(benchmark::State& state) {
  const auto c = thread_coefficients();
  for (auto _ : state) benchmark::DoNotOptimize(rotation_number(0.03, 0.01, c));
}
BENCHMARK(BM_RotationNumber);

void BM_MonodromyLoop(benchmark::State& state) {
  const auto c = thread_coefficients();
  const auto loop = ellipse_loop(0.0, 0.0, 0.05, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(monodromy_around_thread(loop, c));
}
BENCHMARK(BM_MonodromyLoop)->Unit(benchmark::kMillisecond);

}  // namespace
