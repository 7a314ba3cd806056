// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <numbers>

#include "nisio/mc.hpp"
#include "nisio/semigroup.hpp"

using namespace nisio;
using kernels::Execution;

namespace {

GeneratorFamily heat_family(int dim) {
  LevyQuadruple a = LevyQuadruple::diffusion(0.5), b = LevyQuadruple::diffusion(1.0);
  if (dim == 2) {
    a = b = LevyQuadruple::zero(2);
    a.sigma = {{{0.5, 0.0}, {0.0, 1.0}}};
    b.sigma = {{{1.0, 0.2}, {0.2, 0.5}}};
  }
  LevyQuadruple c = LevyQuadruple::compound_poisson({{{0.5, 0.0}, 1.0}}, dim);
  return GeneratorFamily({a, b, c});
}

// args: dim, n, execution (0 parallel, 1 serial)
void BM_SupStep(benchmark::State& state) {
  const int dim = int(state.range(0)), n = int(state.range(1));
  const Execution exec = state.range(2) ? Execution::serial : Execution::parallel;
  TorusGrid g = make_grid(dim, n);
  DiscreteFamily fam(heat_family(dim), g);
  SupStep step(fam, 0.01);
  GridFunction f = InitialFunction::bump({0.0, 0.0}, std::numbers::pi / 2).sample(g);
  std::vector<int> argmax;
  for (auto _ : state) benchmark::DoNotOptimize(step.apply(f, &argmax, exec));
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}

void BM_Estimate(benchmark::State& state) {
  const auto n_paths = std::size_t(state.range(0));
  const Execution exec = state.range(1) ? Execution::serial : Execution::parallel;
  TorusGrid g = make_grid(1, 128);
  DiscreteFamily fam(heat_family(1), g);
  InitialFunction f = InitialFunction::bump({0.0, 0.0}, std::numbers::pi / 2);
  NisioResult r = nisio_evolve(fam, 0.2, f.sample(g), 6, 0.0, true);
  mc::SimpleStrategy s = mc::extract_strategy(r, r.argmax_level);
  for (auto _ : state) benchmark::DoNotOptimize(mc::estimate(fam, s, f, {0.0, 0.0}, 0.2, n_paths, 7, exec));
  state.SetItemsProcessed(state.iterations() * std::int64_t(n_paths));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}

}  // namespace

// The serial sup step uses the direct DFT, so large serial grids are slow.
BENCHMARK(BM_SupStep)
    ->ArgsProduct({{1}, {256, 1024}, {0, 1}})
    ->Args({1, 4096, 0})
    ->ArgsProduct({{2}, {32, 64}, {0, 1}})
    ->Args({2, 256, 0})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Estimate)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
