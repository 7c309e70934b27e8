#include <benchmark/benchmark.h>

#include "djp/dde.hpp"
#include "djp/lattice.hpp"
#include "djp/simulator.hpp"

using namespace djp;

namespace {

StripMeasure unit_delay_unit_jump() {
  return StripMeasure::atomic({{1.0, -1.0, {1.0}}});
}

void DelayedCounterTrajectory(benchmark::State& state) {
  const auto q = unit_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  const InitialCondition init{JumpMarginal::point({0.0}), false};
  const double horizon = static_cast<double>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = Rng::substream(1, i++);
    const Trajectory traj = simulate(q, policy, init, horizon, rng);
    benchmark::DoNotOptimize(traj.jump_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(DelayedCounterTrajectory)->Arg(100)->Arg(400);

void HyperbolicTrajectory(benchmark::State& state) {
  const auto q = StripMeasure::product_coupled(
      ThetaMeasure::point(-1.0), [](double th, double* out) { out[0] = th; },
      1, "linear");
  const auto policy = RatePolicy::hyperbolic_dde(
      1.01, 1.0, ThetaMeasure::point(-1.0), [](double) { return 1.0; }, 100.0);
  const InitialCondition init{JumpMarginal::uniform_box({0.0}, {1.0}), false};
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = Rng::substream(2, i++);
    const Trajectory traj = simulate(q, policy, init, 100.0, rng);
    benchmark::DoNotOptimize(traj.jump_count());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(HyperbolicTrajectory);

void DdeSolve(benchmark::State& state) {
  const auto kernel = DelayKernel::atoms({{1.01 * std::exp(1.0), -1.0}});
  for (auto _ : state) {
    const auto sol = solve(kernel, [](double) { return 1.0; },
                           static_cast<double>(state.range(0)), 1e-3);
    benchmark::DoNotOptimize(sol.eval(1.0));
  }
}
BENCHMARK(DdeSolve)->Arg(10)->Arg(100);

void LatticeSolve(benchmark::State& state) {
  const auto q = unit_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  for (auto _ : state) {
    const auto evolution =
        solve_lattice(q, policy, {{{0, 0}, 1.0}}, 1, 5.0, 1e-3);
    benchmark::DoNotOptimize(evolution.marginal_law(5.0).mass.size());
  }
}
BENCHMARK(LatticeSolve);

void StripTiltedSampling(benchmark::State& state) {
  const auto q = StripMeasure::product(
      ThetaMeasure::density([](double) { return 1.0; }, "uniform"),
      JumpMarginal::uniform_box({-0.5}, {0.5}));
  Rng rng(3);
  Vec z(1);
  double theta = 0.0;
  for (auto _ : state) {
    q.sample_tilted_into([](double th) { return std::exp(th); }, 1.0, rng,
                         theta, z.data());
    benchmark::DoNotOptimize(theta);
  }
}
BENCHMARK(StripTiltedSampling);

}  // namespace

BENCHMARK_MAIN();
