#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rydsim/counting.hpp"
#include "rydsim/detection.hpp"
#include "rydsim/fitting.hpp"
#include "rydsim/rydberg_memory.hpp"

using namespace rydsim;

namespace {

ScenarioConfig bench_config() {
  ScenarioConfig c;
  c.source.p = 0.02;
  return c;
}

void BM_RunTrials(benchmark::State& state) {
  const auto c = bench_config();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(detect::run_trials(c, n, 1, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrials)->Args({1'000'000, 1})->Args({1'000'000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_CrossCorrelation(benchmark::State& state) {
  const auto c = bench_config();
  const auto stream = detect::run_trials(c, static_cast<std::uint64_t>(state.range(0)), 2, 4);
  const auto w = counting::window_spec(c);
  for (auto _ : state) benchmark::DoNotOptimize(counting::g2_from_histogram(counting::start_stop_histogram(stream, w)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrossCorrelation)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_EitFit(benchmark::State& state) {
  memory::EitMediumParams truth;
  std::vector<fit::DataPoint> data;
  for (int i = 0; i <= 120; ++i) {
    const double d = -15.0 + 0.25 * i;
    data.push_back({d, memory::transmission(truth, d), 0.01});
  }
  auto problem = fit::make_problem(fit::ModelId::kEitSpectrum, data);
  for (auto& p : problem.params) p.value *= p.fixed ? 1.0 : 0.8;
  for (auto _ : state) benchmark::DoNotOptimize(fit::fit(problem));
}
BENCHMARK(BM_EitFit)->Unit(benchmark::kMillisecond);

void BM_CollectiveDephasing(benchmark::State& state) {
  const double dk = constants::wavenumber(constants::kWavelengthD2) * std::sin(3.4 * constants::kPi / 180.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(memory::simulate_collective_dephasing(static_cast<int>(state.range(0)), 77e-6, dk, 24e-6, 3));
}
BENCHMARK(BM_CollectiveDephasing)->Arg(10'000);

}  // namespace
BENCHMARK_MAIN();
