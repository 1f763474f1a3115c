#include <cmath>

#include <benchmark/benchmark.h>

#include "movdom/moser.hpp"
#include "movdom/propagator.hpp"
#include "movdom/scenarios.hpp"

using namespace movdom;

static void BM_AssembleRotation(benchmark::State& state) {
  ScenarioParameters p;
  p.cells = static_cast<int>(state.range(0));
  const ScenarioDef s = build_scenario("rotation", p);
  for (auto _ : state) benchmark::DoNotOptimize(s.hamiltonian(0.3).matrix.nonZeros());
}
BENCHMARK(BM_AssembleRotation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_AssembleInterval(benchmark::State& state) {
  ScenarioParameters p;
  p.cells = static_cast<int>(state.range(0));
  const ScenarioDef s = build_scenario("moving_interval", p);
  for (auto _ : state) benchmark::DoNotOptimize(s.hamiltonian(0.3).matrix.nonZeros());
}
BENCHMARK(BM_AssembleInterval)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_CayleyStep(benchmark::State& state) {
  ScenarioParameters p;
  const bool planar = state.range(0) == 2;
  p.cells = planar ? 64 : 200;
  const ScenarioDef s = build_scenario(planar ? "rotation" : "moving_interval", p);
  const DiscreteHamiltonian H = s.hamiltonian(0.3);
  CVector z = H.to_dofs(s.initial_state());
  for (auto _ : state) {
    z = cayley_step(H.matrix, z, 1e-3);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_CayleyStep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_DivergenceRightInverse(benchmark::State& state) {
  const GridPtr g = ReferenceGrid::unit(2, static_cast<int>(state.range(0)));
  const auto Linv = build_divergence_right_inverse(g);
  RVector v(g->cell_count());
  for (Index c = 0; c < v.size(); ++c) v(c) = std::sin(0.37 * c);
  for (auto _ : state) benchmark::DoNotOptimize(Linv->apply(v).max_abs());
}
BENCHMARK(BM_DivergenceRightInverse)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_MoserFixedPoint(benchmark::State& state) {
  const GridPtr g = ReferenceGrid::unit(2, static_cast<int>(state.range(0)));
  const DensityFamily f = DensityFamily::stationary(
      [](const Vec& y) {
        return 1.0 + 0.05 * std::sin(2 * kPi * y(0)) * std::sin(2 * kPi * y(1));
      },
      true);
  cached_right_inverse(g);
  for (auto _ : state) benchmark::DoNotOptimize(moser_fixed_point(f, g, 0.0).residual);
}
BENCHMARK(BM_MoserFixedPoint)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
