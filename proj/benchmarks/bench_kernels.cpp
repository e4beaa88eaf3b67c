#include <benchmark/benchmark.h>

#include "qhydro/analysis.hpp"
#include "qhydro/bohm.hpp"
#include "qhydro/brownian.hpp"
#include "qhydro/madelung.hpp"
#include "qhydro/schrodinger.hpp"
#include "qhydro/wigner.hpp"

using namespace qhydro;

namespace {

void split_step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Grid g(n, 40.0, -20.0);
  auto U = Potential::quartic(g, 0.1);
  auto s = init_state(GaussianState{1.0, 0.5, 1.0}, g, {});
  SplitStepPropagator prop(U, s.constants, 1e-5);
  for (auto _ : state) {
    prop.advance(s);
    benchmark::DoNotOptimize(s.psi.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(split_step)->RangeMultiplier(2)->Range(256, 4096);

void split_step_2d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Grid a(n, 40.0, -20.0);
  Grid2D g{a, a};
  auto U = Potential::harmonic(a, 1.0, 1.0);
  auto s = init_state(SymmetrizedPairState{}, g, {});
  SplitStepPropagator2D prop(U, g, s.constants, 1e-3);
  for (auto _ : state) prop.advance(s);
}
BENCHMARK(split_step_2d)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void madelung_decompose(benchmark::State& state) {
  Grid g(512, 40.0, -20.0);
  auto s = init_state(GaussianState{0.0, 1.0, 1.0}, g, {});
  for (auto _ : state) benchmark::DoNotOptimize(decompose(s));
}
BENCHMARK(madelung_decompose);

void wigner_transform_bench(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Grid g(n, 24.0, -12.0);
  auto s = init_state(GaussianState{1.0, 0.0, 1.0}, g, {});
  for (auto _ : state) benchmark::DoNotOptimize(wigner_transform(s));
}
BENCHMARK(wigner_transform_bench)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void moyal_step_bench(benchmark::State& state) {
  const auto k_max = static_cast<int>(state.range(0));
  Grid g(128, 24.0, -12.0);
  auto w = wigner_transform(init_state(GaussianState{1.0, 0.0, 1.0}, g, {}));
  MoyalPropagator prop(w.grid, Potential::quartic(g, 0.1), w.constants, 1e-3, k_max);
  for (auto _ : state) prop.advance(w, 1);
}
BENCHMARK(moyal_step_bench)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void guidance_paths(benchmark::State& state) {
  Grid g(512, 40.0, -20.0);
  auto tape = record_tape(init_state(GaussianState{}, g, {}), Potential::free(g), 1e-3, 10, 101);
  auto x0 = sample_initial(tape.frame(0).rho, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_guidance(tape, x0, 1e-3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(guidance_paths)->Arg(1000)->Unit(benchmark::kMillisecond);

void kde_bench(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Grid g(4096, 40.0, -20.0);
  EmpiricalSample s{gaussian_draws(n, 0.0, 1.0, 3), {}};
  for (auto _ : state) benchmark::DoNotOptimize(kde_with_derivative(s, g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(kde_bench)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void ks_bench(benchmark::State& state) {
  EmpiricalSample s{gaussian_draws(static_cast<std::size_t>(state.range(0)), 0.0, 1.0, 4), {}};
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(s, cdf));
}
BENCHMARK(ks_bench)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
