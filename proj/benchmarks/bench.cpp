#include <cmath>

#include <benchmark/benchmark.h>

#include "gatsim/csbm.hpp"
#include "gatsim/log.hpp"
#include "gatsim/moments.hpp"
#include "gatsim/network.hpp"
#include "gatsim/oversmoothing.hpp"

using namespace gatsim;

namespace {

CsbmParams bench_params(std::size_t n) {
  return CsbmParams::from_scaling(n, 3.0, 2.0, 2.0 * 10.0 * std::sqrt(std::log(static_cast<double>(n))), 10.0);
}

void BM_SampleCsbm(benchmark::State& state) {
  const auto params = bench_params(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_csbm(params, seed++));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SampleCsbm)->Arg(500)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ForwardLayer(benchmark::State& state) {
  const auto graph = sample_csbm(bench_params(static_cast<std::size_t>(state.range(0))), 1);
  const AttentionSpec spec = state.range(1) == 0 ? AttentionSpec{Uniform{}} : AttentionSpec{SignSym{5.0}};
  for (auto _ : state) benchmark::DoNotOptimize(forward_layer(graph, graph.features(), spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(graph.edge_count()) * 2);
}
BENCHMARK(BM_ForwardLayer)->Args({3000, 0})->Args({3000, 1})->Unit(benchmark::kMicrosecond);

void BM_TraceGamma(benchmark::State& state) {
  const auto graph = sample_csbm(bench_params(3000), 2);
  const auto schedule = LayerSchedule::repeat(SignSym{1.0}, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trace_gamma(graph, schedule));
}
BENCHMARK(BM_TraceGamma)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LogAttentionSum(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const double x = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(log_attention_sum(std::log(x), std::log1p(-x), 1.0, size, size, 2));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogAttentionSum)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_ClosedForm(benchmark::State& state) {
  const MomentInputs in{1.0, 1.0, 1.0, 100, 40};
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_detail(in));
}
BENCHMARK(BM_ClosedForm);

void BM_MonteCarloMoments(benchmark::State& state) {
  const MomentInputs in{1.0, 1.0, 1.0, 20, 10};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(monte_carlo_moments(in, static_cast<std::size_t>(state.range(0)), seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloMoments)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  set_warnings_enabled(false);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
