#include <benchmark/benchmark.h>

#include <vector>

#include "biphoton/bell.hpp"
#include "biphoton/double_slit.hpp"
#include "biphoton/mc/rng.hpp"
#include "biphoton/polarization.hpp"
#include "biphoton/qkd.hpp"

using namespace biphoton;

static void BM_CoincidenceProb(benchmark::State& state) {
  const BiphotonState s(0.4);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        coincidence_prob(s, AnalyzerSetting::lossy(t, 0.98, 0.01), AnalyzerSetting::ideal(45.0)));
    t += 0.1;
  }
}
BENCHMARK(BM_CoincidenceProb);

static void BM_ChOptimize(benchmark::State& state) {
  const BiphotonState s(0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bell::ch_optimize(s, {}, {}, bell::ChForm::substituted));
  }
}
BENCHMARK(BM_ChOptimize)->Unit(benchmark::kMillisecond);

static void BM_LoopholeCell(benchmark::State& state) {
  const BiphotonState s(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bell::max_strict_ch_per_detection(s, 0.85));
  }
}
BENCHMARK(BM_LoopholeCell)->Unit(benchmark::kMillisecond);

static void BM_QkdRounds(benchmark::State& state) {
  const qkd::EveStrategy eve{qkd::EveKind::breidbart, 1.0, qkd::EveTarget::both};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkd::run_protocol({}, qkd::ChannelKind::double_entangled,
                                               static_cast<std::uint64_t>(state.range(0)), eve, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QkdRounds)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SqmDensity(benchmark::State& state) {
  const double_slit::SlitGeometry g;
  double_slit::DetectorPlane p1, p2;
  p1.distance = 1.21;
  p1.aperture = 2e-3;
  p2.distance = 1.5;
  p2.aperture = 6e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(double_slit::sqm_density(g, p1, -0.017, p2, -0.055));
  }
}
BENCHMARK(BM_SqmDensity);

static void BM_Philox(benchmark::State& state) {
  mc::RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng());
  state.SetBytesProcessed(state.iterations() * 8);
}
BENCHMARK(BM_Philox);
BENCHMARK_MAIN();
