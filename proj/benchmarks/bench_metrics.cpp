#include <benchmark/benchmark.h>

#include <vector>

#include "polylab/keyed_rng.hpp"
#include "polylab/metrics.hpp"
#include "polylab/normal.hpp"

namespace {

using namespace polylab;

std::vector<double> normal_sample(std::size_t count) {
  const KeyedStream stream(11);
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = normal_quantile(stream.uniform(i));
  return xs;
}

void BM_KsDistance(benchmark::State& state) {
  const EmpiricalMeasure1D emp(normal_sample(static_cast<std::size_t>(state.range(0))));
  const Cdf normal = Cdf::gaussian(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(emp, normal));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsDistance)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oN);

void BM_LevyDistance(benchmark::State& state) {
  const EmpiricalMeasure1D emp(normal_sample(static_cast<std::size_t>(state.range(0))));
  const Cdf normal = Cdf::gaussian(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(levy_distance(emp, normal));
}
BENCHMARK(BM_LevyDistance)->Arg(10000);

}  // namespace
