// Serial reference kernels against their OpenMP forms.
#include "steinvar/grid.hpp"
#include "steinvar/stein_factors.hpp"
#include "steinvar/stein_ops.hpp"

#include <benchmark/benchmark.h>

using namespace steinvar;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "openmp" : "serial"); }

void BM_PseudoInverseGrid(benchmark::State& state) {
  const auto d = make_builtin(Gamma{1.3, 2.4});
  const auto lh = pseudo_inverse(d, Shift::differential(), TestFunction::sine());
  const auto xs = support_grid(d, 200);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate([&](double x) { return lh(x); }, xs, mode(state)));
  label(state);
}

void BM_KernelMatrix(benchmark::State& state) {
  const auto d = make_builtin(Normal{0.0, 1.0});
  const auto xs = linspace(-4.0, 4.0, 400);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(d, Shift::differential(), xs, mode(state)));
  label(state);
}

void BM_FactorProfile(benchmark::State& state) {
  const auto d = make_builtin(Beta{1.3, 2.4});
  const auto xs = linspace(0.001, 0.999, 20000);
  for (auto _ : state) benchmark::DoNotOptimize(factor_profile(d, Shift::differential(), xs, mode(state)).sup_on_grid);
  label(state);
}

}  // namespace

BENCHMARK(BM_PseudoInverseGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KernelMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FactorProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
