#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "cyma/calculus.hpp"
#include "cyma/envelope.hpp"
#include "cyma/ma.hpp"
#include "cyma/random.hpp"
#include "cyma/solver.hpp"

using namespace cyma;

namespace {

ScalarField cosine(GridPtr grid, double amp) {
  std::vector<double> v(grid->point_count());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = amp * std::cos(2.0 * std::numbers::pi * grid->coordinate(i, 0));
  return ScalarField(std::move(grid), std::move(v));
}

void BM_ddc(benchmark::State& state) {
  auto grid = TorusGrid::make(1, static_cast<int>(state.range(0)));
  FieldSampler sampler(1);
  const ScalarField phi = sampler.band_limited(grid, grid->res() / 4, 1.0);
  for (auto _ : state) {
    HermitianField h = ddc(phi);
    benchmark::DoNotOptimize(h);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ddc)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_ma_density_n2(benchmark::State& state) {
  auto grid = TorusGrid::make(2, static_cast<int>(state.range(0)));
  const HermitianField omega = HermitianField::identity(grid);
  FieldSampler sampler(2);
  const ScalarField phi = sampler.admissible_potential(omega, 4, 0.5);
  for (auto _ : state) {
    DensityRatio r = ma_density(omega, phi);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ma_density_n2)->Arg(8)->Arg(16);

void BM_newton_solve(benchmark::State& state) {
  auto grid = TorusGrid::make(1, static_cast<int>(state.range(0)));
  const HermitianField omega = HermitianField::identity(grid);
  const ScalarField f = cosine(grid, 0.5);
  for (auto _ : state) {
    MAProblem p{omega, 1.0, f, Normalization::none, 1e-9, 50};
    MASolution sol = newton_solve(p);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_newton_solve)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_calabi_solve(benchmark::State& state) {
  auto grid = TorusGrid::make(1, static_cast<int>(state.range(0)));
  const HermitianField omega = HermitianField::identity(grid);
  const ScalarField f = cosine(grid, 0.3) + 1.0;
  for (auto _ : state) {
    MASolution sol = solve_calabi(omega, f, 2.0);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_calabi_solve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_obstacle_oracle(benchmark::State& state) {
  auto grid = TorusGrid::make(1, static_cast<int>(state.range(0)));
  const HermitianField omega = HermitianField::identity(grid);
  const ScalarField g = cosine(grid, 0.2);
  for (auto _ : state) {
    ScalarField u = envelope_obstacle_oracle(omega, g);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_obstacle_oracle)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
