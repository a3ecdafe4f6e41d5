#include <benchmark/benchmark.h>

#include <numbers>

#include "gnls/forward.hpp"
#include "gnls/hierarchy.hpp"
#include "gnls/inversion.hpp"

using namespace gnls;

namespace {

NonlinearPotential roundtrip_potential() {
  return NonlinearPotential(1.0, {CoefficientFunction::zero(1.0), CoefficientFunction::sinusoid(1.0, 0.3, std::numbers::pi),
                                  CoefficientFunction::exponential(1.0, 0.5)});
}

DataSetDn data_with_q0(double q0, std::size_t n, const SpatialGrid& grid) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, q0),
                                   CoefficientFunction::sinusoid(1.0, 0.3, std::numbers::pi),
                                   CoefficientFunction::exponential(1.0, 0.5)});
  std::vector<CoefficientFunction> known;
  for (std::size_t j = 0; j + 2 <= n; ++j) known.push_back(p.coefficient(j));
  return {n, 1.0, known, cascade_provider(p, n, grid)};
}

}  // namespace

static void BM_SolveNonlinear(benchmark::State& state) {
  const SpatialGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  const auto p = roundtrip_potential();
  for (auto _ : state) benchmark::DoNotOptimize(solve_nonlinear(p, 2.0, 0.05, grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveNonlinear)->RangeMultiplier(2)->Range(500, 8000)->Complexity();

static void BM_Cascade(benchmark::State& state) {
  const SpatialGrid grid(1.0, 2000);
  const auto p = roundtrip_potential();
  const auto order = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cascade(p, cplx(5.0, 0.01), order, grid));
}
BENCHMARK(BM_Cascade)->DenseRange(2, 6, 2);

static void BM_BuildSystem(benchmark::State& state) {
  const SpatialGrid grid(1.0, 2000);
  const auto d = data_with_q0(0.05, 2, grid);
  const auto contour = make_contour(2, 1.0, static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(build_system(d, grid, contour));
}
BENCHMARK(BM_BuildSystem)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_InvertDirect(benchmark::State& state) {
  const SpatialGrid grid(1.0, 2000);
  const auto sys = build_system(data_with_q0(0.05, 2, grid), grid,
                                make_contour(2, 1.0, static_cast<std::size_t>(state.range(0)), 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(invert_direct(sys));
}
BENCHMARK(BM_InvertDirect)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_InvertNeumann(benchmark::State& state) {
  const SpatialGrid grid(1.0, 2000);
  const double xi = auto_xi(2, 1.0, 0.05, Route::F);
  const auto sys = build_system(data_with_q0(0.05, 2, grid), grid,
                                make_contour(2, 1.0, static_cast<std::size_t>(state.range(0)), xi));
  for (auto _ : state) benchmark::DoNotOptimize(invert_neumann(sys));
}
BENCHMARK(BM_InvertNeumann)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
