#include <benchmark/benchmark.h>

#include "polylab/environment.hpp"
#include "polylab/partition.hpp"
#include "polylab/sampler.hpp"

namespace {

using namespace polylab;

EnvironmentField lognormal_field(double beta) { return EnvironmentField(EnvironmentSpec{LogNormalLaw{beta}, 7}); }

// Full forward run to time n; reports lattice cells touched per second.
void BM_Propagate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const std::int64_t n = state.range(1);
  const auto field = lognormal_field(0.2);
  std::int64_t cells = 0;
  for (std::int64_t k = 1; k <= n; ++k) cells += static_cast<std::int64_t>(Box(d, static_cast<int>(k)).size());
  for (auto _ : state) {
    auto slice = propagate(field, PartitionSlice::origin(d), n);
    benchmark::DoNotOptimize(slice.log_total());
  }
  state.counters["cells/s"] = benchmark::Counter(static_cast<double>(cells), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Propagate)->Args({1, 2000})->Args({2, 200})->Args({3, 64})->Unit(benchmark::kMillisecond);

void BM_PropagateTruncated(benchmark::State& state) {
  const auto field = lognormal_field(0.2);
  const Truncation trunc{static_cast<double>(state.range(1)) / 10.0};
  for (auto _ : state) {
    auto slice = propagate(field, PartitionSlice::origin(3), state.range(0), trunc);
    benchmark::DoNotOptimize(slice.log_total());
  }
}
BENCHMARK(BM_PropagateTruncated)->Args({200, 30})->Args({200, 25})->Unit(benchmark::kMillisecond);

void BM_SiteValue(benchmark::State& state) {
  const auto field = lognormal_field(1.0);
  Site x;
  std::int64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(site_value(field, k, x));
    x[0] = (x[0] + 1) & 1023;
    ++k;
  }
}
BENCHMARK(BM_SiteValue);

void BM_BackwardSample(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const std::int64_t n = state.range(1);
  const auto field = lognormal_field(0.2);
  const auto slices = forward_slices(field, d, n);
  const EndpointSampler endpoint(slices.back());
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto path = backward_sample(slices, endpoint, sampler_stream(1, 0, i++));
    benchmark::DoNotOptimize(path.sites.data());
  }
}
BENCHMARK(BM_BackwardSample)->Args({1, 400})->Args({3, 100});

}  // namespace

namespace {

// Same sweep with zeta == 1: isolates the recursion from environment hashing.
void BM_PropagateUnit(benchmark::State& state) {
  const polylab::UnitWeights unit;
  const polylab::Truncation trunc{static_cast<double>(state.range(1)) / 10.0};
  for (auto _ : state) {
    auto slice = polylab::propagate(unit, polylab::PartitionSlice::origin(3), state.range(0), trunc);
    benchmark::DoNotOptimize(slice.log_total());
  }
}
BENCHMARK(BM_PropagateUnit)->Args({200, 30})->Unit(benchmark::kMillisecond);

}  // namespace
