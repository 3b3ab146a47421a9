#include <benchmark/benchmark.h>

#include "logsub/corpus.hpp"
#include "logsub/grid.hpp"
#include "logsub/maximal.hpp"
#include "logsub/partition.hpp"
#include "logsub/squarefn.hpp"

namespace {

using namespace logsub;

Field sample_field(std::size_t n) {
  const TorusGrid g(1, n);
  return gen_corpus({1, CorpusKind::random_bandlimited, 1, 4, g.max_annulus(), 2.0, 1.0}, g).front();
}

void BM_ForwardInverse(benchmark::State& state) {
  const auto f = sample_field(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(inverse(forward(f)));
}
BENCHMARK(BM_ForwardInverse)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Unit(benchmark::kMillisecond);

void BM_GStarSquared(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LogParams p = LogParams::defaults();
  const TorusGrid g(1, n);
  const SquareFunctionEngine eng(p, g, default_scale_grid(p, g));
  const auto F = forward(sample_field(n));
  benchmark::DoNotOptimize(eng.g_star_squared(F, 0.0, p.lambda));  // builds transfers
  for (auto _ : state) benchmark::DoNotOptimize(eng.g_star_squared(F, p.beta, p.lambda));
}
BENCHMARK(BM_GStarSquared)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_LogMaximal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LogParams p = LogParams::defaults();
  const TorusGrid g(1, n);
  const auto scales = default_scale_grid(p, g);
  const auto w = gen_weight({WeightKind::smoothed_random, 1}, g);
  for (auto _ : state) benchmark::DoNotOptimize(log_maximal(w, p, scales));
}
BENCHMARK(BM_LogMaximal)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_ProjectAllCells(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LogParams p = LogParams::defaults();
  const TorusGrid g(1, n);
  const auto F = forward(sample_field(n));
  const auto cells = all_cells(p, g.max_annulus());
  for (auto _ : state) {
    for (const auto& c : cells) benchmark::DoNotOptimize(project_sparse(F, c, p));
  }
  state.counters["cells"] = static_cast<double>(cells.size());
}
BENCHMARK(BM_ProjectAllCells)->Arg(1 << 14)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
