#include <benchmark/benchmark.h>

#include <random>

#include "heatobs/anra.hpp"
#include "heatobs/heat_solver.hpp"
#include "heatobs/observer.hpp"
#include "heatobs/stencil.hpp"

using namespace heatobs;

namespace {

// The reference grid: 4 x 2 x 2 cm at 0.05 cm.
const Grid3& reference_grid() {
  static const Grid3 g = Grid3::tissue_block({0.04, 0.02, 0.02}, 5e-4);
  return g;
}

ScalarField3D noisy_field(const Grid3& g, double mean, double spread) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-spread, spread);
  ScalarField3D f(g);
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = mean + d(rng);
  return f;
}

void BM_Laplacian(benchmark::State& state) {
  const ScalarField3D f = noisy_field(reference_grid(), 300.0, 5.0);
  const auto bc = BoundaryCondition::insulated_top(300.0);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f, bc));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_Laplacian)->Unit(benchmark::kMillisecond);

void BM_CrankNicolsonStep(benchmark::State& state) {
  const Grid3& g = reference_grid();
  const HeatStepper stepper(g, BoundaryCondition::insulated_top(300.0));
  SolverParams p;
  p.ordering = state.range(0) ? GsOrdering::RedBlack : GsOrdering::Lexicographic;
  const ScalarField3D x = noisy_field(g, 300.0, 5.0);
  const ScalarField3D forcing(g, 0.0);
  const double a = MaterialProps{}.diffusivity();
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(x, a, forcing, p));
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AnraEstimate(benchmark::State& state) {
  const Grid3& g = reference_grid();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d(0.0, 0.5);
  FrameHistory history(7);
  for (int k = 0; k < 7; ++k) {
    SurfaceFrame f(g.count(1), g.count(0), g.spacing(), 0.02 * k, 300.0);
    for (double& v : f.values) v += d(rng);
    history.push(f, 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_diffusivity(history, AnraParams{}));
}
BENCHMARK(BM_AnraEstimate)->Unit(benchmark::kMillisecond);

void BM_GainLowerBound(benchmark::State& state) {
  const Grid3& g = reference_grid();
  const SensorSet s = SensorSet::top_face(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SurfaceFrame r(s.rows(), s.cols(), s.pitch(), 0.0);
  for (double& v : r.values) v = d(rng);
  const GainBoundInputs in{1e-3, 50.0, MaterialProps{}.diffusivity()};
  for (auto _ : state) benchmark::DoNotOptimize(gain_lower_bound(r, 1.0, in, g, s));
}
BENCHMARK(BM_GainLowerBound)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
