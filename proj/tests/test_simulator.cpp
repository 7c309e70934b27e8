#include <cmath>
#include <map>
#include <vector>

#include <doctest.h>

#include "djp/errors.hpp"
#include "djp/simulator.hpp"
#include "djp/stats.hpp"

using namespace djp;

namespace {

StripMeasure unit_delay_unit_jump() {
  return StripMeasure::atomic({{1.0, -1.0, {1.0}}});
}

StripMeasure no_delay_unit_jump() {
  return StripMeasure::atomic({{1.0, 0.0, {1.0}}});
}

InitialCondition zero_init() { return {JumpMarginal::point({0.0}), false}; }

double poisson_pmf(int k, double lambda) {
  return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

}  // namespace

TEST_CASE("cadlag evaluation of a hand-built path") {
  Rng rng(1);
  InitialCondition init = zero_init();
  Trajectory traj(1, 10.0, InitialHistory(init, rng));
  CHECK(traj.evaluate(0.5)[0] == 0.0);

  const double v1 = 5.0;
  traj.append_jump(1.0, &v1);
  CHECK(traj.evaluate(1.0)[0] == 5.0);
  CHECK(traj.evaluate_left(1.0)[0] == 0.0);

  const double v2 = 2.0, v3 = 7.0;
  Rng rng2(1);
  Trajectory traj2(1, 10.0, InitialHistory(init, rng2));
  traj2.append_jump(1.0, &v2);
  traj2.append_jump(3.0, &v3);
  CHECK(traj2.evaluate(2.9)[0] == 2.0);
  CHECK(traj2.evaluate(3.0)[0] == 7.0);
  CHECK(traj2.evaluate_left(3.0)[0] == 2.0);
  CHECK(traj2.evaluate(-0.5)[0] == 0.0);
  CHECK_THROWS_AS(traj2.evaluate(11.0), ConfigError);
}

TEST_CASE("no-delay counting process has Poisson event counts") {
  const auto q = no_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  const std::size_t n = 10'000;
  double total = 0.0;
  std::map<int, double> counts;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(41, i);
    const Trajectory traj = simulate(q, policy, zero_init(), 10.0, rng);
    total += static_cast<double>(traj.jump_count());
    counts[static_cast<int>(traj.jump_count())] += 1.0;
  }
  CHECK(std::abs(total / n - 10.0) <= 0.3);

  // chi-squared fit against the Poisson(10) counts
  const int kmax = 40;
  std::vector<double> observed(kmax + 1, 0.0), expected(kmax + 1, 0.0);
  for (const auto& [k, c] : counts) observed[std::min(k, kmax)] += c;
  double covered = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    expected[k] = n * poisson_pmf(k, 10.0);
    covered += poisson_pmf(k, 10.0);
  }
  expected[kmax] += n * (1.0 - covered);  // pool the far tail
  CHECK(chi_squared_gof_pvalue(observed, expected) > 0.01);
}

TEST_CASE("unit-delay counting: the first unit interval settles at one") {
  const auto q = unit_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  const std::size_t n = 10'000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(43, i);
    const Trajectory traj = simulate(q, policy, zero_init(), 1.0, rng);
    const double x1 = traj.evaluate(1.0)[0];
    CHECK((x1 == 0.0 || x1 == 1.0));
    if (x1 == 1.0) ++hits;
  }
  const double expected = 1.0 - std::exp(-1.0);
  CHECK(std::abs(double(hits) / n - expected) <= 0.015);
}

TEST_CASE("a vanishing horizon leaves the initial value") {
  const auto q = unit_delay_unit_jump();
  Rng rng(5);
  const Trajectory traj =
      simulate(q, RatePolicy::constant_one(), zero_init(), 1e-9, rng);
  CHECK(traj.jump_count() == 0);
  CHECK(traj.evaluate(0.0)[0] == 0.0);
}

TEST_CASE("substreams decorrelate trajectories") {
  const auto q = unit_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  Rng a = Rng::substream(7, 0);
  Rng b = Rng::substream(7, 1);
  Rng a_again = Rng::substream(7, 0);
  const Trajectory ta = simulate(q, policy, zero_init(), 20.0, a);
  const Trajectory tb = simulate(q, policy, zero_init(), 20.0, b);
  const Trajectory ta2 = simulate(q, policy, zero_init(), 20.0, a_again);
  CHECK(ta.jump_times() == ta2.jump_times());
  CHECK(ta.jump_times() != tb.jump_times());
}

TEST_CASE("ensembles are bitwise reproducible across worker counts") {
  const auto q = unit_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  const auto e1 = simulate_ensemble(q, policy, zero_init(), 50.0,
                                    {10.0, 50.0}, 600, 99, 1);
  const auto e4 = simulate_ensemble(q, policy, zero_init(), 50.0,
                                    {10.0, 50.0}, 600, 99, 4);
  const auto e8 = simulate_ensemble(q, policy, zero_init(), 50.0,
                                    {10.0, 50.0}, 600, 99, 8);
  CHECK(e1.values == e4.values);
  CHECK(e1.values == e8.values);

  const auto again = simulate_ensemble(q, policy, zero_init(), 50.0,
                                       {10.0, 50.0}, 600, 99, 1);
  CHECK(e1.values == again.values);
}

TEST_CASE("ensemble mean ratio approaches one half for the delayed counter") {
  const auto q = unit_delay_unit_jump();
  const auto ens = simulate_ensemble(q, RatePolicy::constant_one(), zero_init(),
                                     50.0, {50.0}, 2000, 7, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < ens.trajectories; ++i) acc += ens.at(i, 0, 0);
  CHECK(std::abs(acc / ens.trajectories / 50.0 - 0.5) <= 0.005);
}

TEST_CASE("integer scenarios stay on the lattice exactly") {
  const auto q = StripMeasure::atomic({{0.6, -1.0, {1.0}}, {0.4, -0.5, {-2.0}}});
  Rng rng(11);
  const Trajectory traj =
      simulate(q, RatePolicy::constant_one(), zero_init(), 30.0, rng);
  for (double t : {3.0, 7.5, 15.0, 30.0}) {
    const double v = traj.evaluate(t)[0];
    CHECK(v == std::round(v));
  }
}

TEST_CASE("inversion sampler reduces to the homogeneous case") {
  // kernel at zero with unit mass: y = e^t, so the cumulative intensity is t
  const auto policy = RatePolicy::hyperbolic_dde(
      1.0, 0.0, ThetaMeasure::point(0.0), [](double) { return 1.0; }, 12.0);
  const std::size_t n = 10'000;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(13, i);
    total += static_cast<double>(
        inversion_times_hyperbolic(policy, 10.0, rng).size());
  }
  CHECK(std::abs(total / n - 10.0) <= 0.3);

  Rng rng(17);
  CHECK(inversion_times_hyperbolic(policy, 1e-9, rng).empty());
  CHECK_THROWS_AS(inversion_times_hyperbolic(policy, 100.0, rng), ConfigError);
  CHECK_THROWS_AS(
      inversion_times_hyperbolic(RatePolicy::constant_one(), 1.0, rng),
      ConfigError);
}

TEST_CASE("thinning and inversion agree on the hyperbolic scenario") {
  const auto q = StripMeasure::product_coupled(
      ThetaMeasure::point(-1.0), [](double th, double* out) { out[0] = th; },
      1, "linear");
  const auto policy = RatePolicy::hyperbolic_dde(
      1.01, 1.0, ThetaMeasure::point(-1.0), [](double) { return 1.0; }, 50.0);
  const InitialCondition init{JumpMarginal::uniform_box({0.0}, {1.0}), false};
  const double horizon = 50.0;
  const std::size_t n = 4000;

  std::vector<double> thin_terminal(n), inv_terminal(n);
  double thin_count = 0.0, thin_count2 = 0.0;
  double inv_count = 0.0, inv_count2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(19, i);
    const Trajectory traj = simulate(q, policy, init, horizon, rng);
    thin_terminal[i] = traj.evaluate(horizon)[0];
    const double c = static_cast<double>(traj.jump_count());
    thin_count += c;
    thin_count2 += c * c;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(23, i);
    const auto times = inversion_times_hyperbolic(policy, horizon, rng);
    const Trajectory traj =
        simulate_with_times(q, policy, init, horizon, times, rng);
    inv_terminal[i] = traj.evaluate(horizon)[0];
    const double c = static_cast<double>(times.size());
    inv_count += c;
    inv_count2 += c * c;
  }

  const double mean_thin = thin_count / n, mean_inv = inv_count / n;
  const double var_thin = thin_count2 / n - mean_thin * mean_thin;
  const double var_inv = inv_count2 / n - mean_inv * mean_inv;
  const double se = std::sqrt((var_thin + var_inv) / n);
  CHECK(std::abs(mean_thin - mean_inv) <= 2.0 * se);

  CHECK(ks_two_sample(thin_terminal, inv_terminal) <=
        1.5 * ks_two_sample_critical_value(n, n, 0.01));
}

TEST_CASE("memoized per-theta initial histories are consistent") {
  const InitialCondition init{JumpMarginal::uniform_box({0.0}, {1.0}), true};
  Rng rng(29);
  InitialHistory hist(init, rng);
  const double a = hist.at(-0.5)[0];
  const double b = hist.at(-0.25)[0];
  CHECK(a == hist.at(-0.5)[0]);
  CHECK(a != b);
  CHECK(hist.at(0.0) == hist.at_zero());
}

TEST_CASE("per-theta initial histories leave the terminal law unchanged") {
  // the marginal law evolution only sees marginals of the initial segment, so
  // both history conventions must produce the same terminal distribution
  const auto q = unit_delay_unit_jump();
  const auto policy = RatePolicy::constant_one();
  const InitialCondition constant{JumpMarginal::uniform_box({0.0}, {1.0}), false};
  const InitialCondition independent{JumpMarginal::uniform_box({0.0}, {1.0}), true};
  const std::size_t n = 4000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r1 = Rng::substream(31, i);
    a[i] = simulate(q, policy, constant, 6.0, r1).evaluate(6.0)[0];
    Rng r2 = Rng::substream(37, i);
    b[i] = simulate(q, policy, independent, 6.0, r2).evaluate(6.0)[0];
  }
  CHECK(ks_two_sample(a, b) <= 1.5 * ks_two_sample_critical_value(n, n, 0.01));
}

TEST_CASE("simulation rejects invalid setups") {
  const auto q = unit_delay_unit_jump();
  Rng rng(1);
  CHECK_THROWS_AS(
      simulate(q, RatePolicy::constant_one(), zero_init(), -1.0, rng),
      ConfigError);
  const InitialCondition bad{JumpMarginal::point({0.0, 0.0}), false};
  CHECK_THROWS_AS(simulate(q, RatePolicy::constant_one(), bad, 1.0, rng),
                  ConfigError);
  CHECK_THROWS_AS(simulate_ensemble(q, RatePolicy::constant_one(), zero_init(),
                                    10.0, {20.0}, 10, 1, 1),
                  ConfigError);
}
