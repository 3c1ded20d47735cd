#include <benchmark/benchmark.h>

#include "spincorr/accumulator.hpp"
#include "spincorr/estimators.hpp"
#include "spincorr/models.hpp"
#include "spincorr/optimizer.hpp"

using namespace spincorr;

namespace {

const Setting kA = Setting::from_planar_angle(0.0);
const Setting kB = Setting::from_planar_angle(kPi / 3.0);

void BM_GenerateQm(benchmark::State& state) {
  const auto model = ModelSpec::qm_singlet_half();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_events(model, kA, kB, n, 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GenerateLhv(benchmark::State& state) {
  const auto model = ModelSpec::lhv_linear();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_events(model, kA, kB, n, 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GenerateConservation(benchmark::State& state) {
  const auto model =
      ModelSpec::conservation(SpinMagnitude(static_cast<int>(state.range(1))),
                              ConditionalKind::extremal);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_events(model, kA, kB, n, 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Accumulate(benchmark::State& state) {
  const auto model = ModelSpec::qm_singlet_half();
  const auto events = generate_events(model, kA, kB, static_cast<std::uint64_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(accumulate(kA, kB, model.spin(), events));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MaximizeChsh(benchmark::State& state) {
  const CorrelationFn corr = [](double theta) { return -std::cos(theta); };
  const double step = deg_to_rad(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_chsh(corr, step, 1e-6));
  }
}

}  // namespace

BENCHMARK(BM_GenerateQm)->Arg(1 << 16);
BENCHMARK(BM_GenerateLhv)->Arg(1 << 16);
BENCHMARK(BM_GenerateConservation)->Args({1 << 16, 1})->Args({1 << 16, 4});
BENCHMARK(BM_Accumulate)->Arg(1 << 16);
BENCHMARK(BM_MaximizeChsh)->Arg(2)->Arg(1);

BENCHMARK_MAIN();
