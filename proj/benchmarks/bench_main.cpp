#include <benchmark/benchmark.h>

#include <random>

#include "mrcd/estimator.hpp"
#include "mrcd/ogk.hpp"
#include "mrcd/robust_univariate.hpp"

namespace {

std::vector<double> draws(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (double& x : v) x = z(rng);
  return v;
}

mrcd::DataMatrix data(mrcd::Index n, mrcd::Index p) {
  mrcd::DataMatrix d;
  const auto v = draws(static_cast<std::size_t>(n * p), 3);
  d.values = Eigen::Map<const mrcd::Matrix>(v.data(), n, p);
  return d;
}

void BM_Qn(benchmark::State& state) {
  const auto x = draws(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(mrcd::qn_scale(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Qn)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_KendallTau(benchmark::State& state) {
  const auto x = draws(static_cast<std::size_t>(state.range(0)), 1);
  const auto y = draws(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mrcd::kendall_tau(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_OgkFit(benchmark::State& state) {
  const auto d = data(200, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mrcd::ogk_fit(d));
}
BENCHMARK(BM_OgkFit)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_MrcdFit(benchmark::State& state) {
  const mrcd::Index n = state.range(0), p = state.range(1);
  const auto d = data(n, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mrcd::fit(d, mrcd::default_subset_size(n),
                                       mrcd::TargetRule::equicorrelation));
  }
}
BENCHMARK(BM_MrcdFit)->Args({100, 10})->Args({50, 100})->Args({100, 400})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
