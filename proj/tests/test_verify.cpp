#include <cmath>
#include <vector>

#include <doctest.h>

#include "djp/asymptotics.hpp"
#include "djp/errors.hpp"
#include "djp/stats.hpp"
#include "djp/verify.hpp"

using namespace djp;

namespace {

AsymptoticConstants unit_delay_constants() {
  const auto q = StripMeasure::atomic({{1.0, -1.0, {1.0}}});
  return compute_constants(q, RatePolicy::constant_one());
}

Samples make_samples(const std::vector<double>& values) {
  Samples s;
  s.dim = 1;
  s.n = values.size();
  s.data = values;
  return s;
}

}  // namespace

TEST_CASE("rescaling arithmetic") {
  Samples x = make_samples({200.0, 210.0});
  const Samples z = rescale(x, 400.0, {0.5});
  CHECK(z.data[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(z.data[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(rescale(x, 0.0, {0.5}), ConfigError);
}

TEST_CASE("rescaling is exactly affine-invertible") {
  Rng rng(3);
  const double t = 123.0;
  const Vec drift{0.37};
  for (int i = 0; i < 100; ++i) {
    const double z = rng.normal();
    Samples x = make_samples({t * (drift[0] + z / std::sqrt(t))});
    const Samples back = rescale(x, t, drift);
    CHECK(std::abs(back.data[0] - z) <= 1e-12 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("shifted rescaling differs by a common constant") {
  const auto c = unit_delay_constants();
  const double t = 400.0;
  Samples x = make_samples({180.0, 200.0, 230.0});
  const Samples z_drift = rescale(x, t, c.drift);
  // H(t) = -K t for the constant rate, so both conventions coincide
  const Vec shift{-c.drift[0] * t};
  const Samples z_path = rescale_shifted(x, t, shift);
  for (std::size_t i = 0; i < x.n; ++i)
    CHECK(z_drift.data[i] == doctest::Approx(z_path.data[i]).epsilon(1e-13));
}

TEST_CASE("goodness of fit accepts its own limit law") {
  const auto c = unit_delay_constants();
  const LimitLaw law = limit_law(c);
  Rng rng(5);
  Samples z;
  z.dim = 1;
  z.n = 20'000;
  z.data.resize(z.n);
  for (std::size_t i = 0; i < z.n; ++i) z.data[i] = law.sample(rng)[0];

  GofTolerances tol;
  tol.ks = 1.5 * ks_critical_value(z.n, 0.01);
  tol.var_abs = 0.01;
  const GofReport report = gof_gaussian(z, law, tol);
  CHECK(report.ks_pass);
  CHECK(report.mean_pass);
  CHECK(report.var_pass);
  CHECK(report.kernel_pass);
  CHECK(report.pass);
  CHECK(report.mahalanobis_ks <= 2.0 * ks_critical_value(z.n, 0.01));
}

TEST_CASE("goodness of fit rejects a wrong law") {
  const auto c = unit_delay_constants();
  const LimitLaw law = limit_law(c);
  Rng rng(7);
  Samples z;
  z.dim = 1;
  z.n = 20'000;
  z.data.resize(z.n);
  // uniform samples with the right variance but the wrong shape
  const double half_width = std::sqrt(3.0 * 0.125);
  for (std::size_t i = 0; i < z.n; ++i)
    z.data[i] = half_width * (2.0 * rng.uniform() - 1.0);
  GofTolerances tol;
  tol.ks = 1.5 * ks_critical_value(z.n, 0.01);
  const GofReport report = gof_gaussian(z, law, tol);
  CHECK_FALSE(report.ks_pass);
  CHECK_FALSE(report.pass);
}

TEST_CASE("kernel axes must vanish exactly in the degenerate scenario") {
  const auto q2 = StripMeasure::atomic({{1.0, -1.0, {1.0, 0.0}}});
  const auto c = compute_constants(q2, RatePolicy::constant_one());
  const LimitLaw law = limit_law(c);
  REQUIRE(law.kernel_dim() == 1);

  const InitialCondition init{JumpMarginal::point({0.0, 0.0}), false};
  const auto ens = simulate_ensemble(q2, RatePolicy::constant_one(), init,
                                     50.0, {50.0}, 500, 61, 1);
  const Samples z = rescale(samples_at_probe(ens, 0), 50.0, c.drift);
  GofTolerances tol;
  tol.ks = 0.2;  // small sample; only the kernel check is the point here
  tol.mean_abs = 0.2;
  tol.var_abs = 0.2;
  const GofReport report = gof_gaussian(z, law, tol);
  CHECK(report.kernel_max_abs == 0.0);
  CHECK(report.kernel_pass);
}

TEST_CASE("law of large numbers check on exact and noisy paths") {
  EnsembleResult ens;
  ens.dimension = 1;
  ens.probes = {10.0, 100.0, 1000.0};
  ens.trajectories = 1;
  ens.master_seed = 0;
  // X(t) = K t exactly
  ens.values = {5.0, 50.0, 500.0};
  LlnTolerance tol;
  tol.covariance_trace = 0.125;
  const LlnReport exact = check_lln(ens, {0.5}, tol);
  CHECK(exact.pass);
  CHECK(exact.probes.back().error == 0.0);

  // drifting away from K must fail the final band
  ens.values = {5.0, 52.0, 540.0};
  const LlnReport off = check_lln(ens, {0.5}, tol);
  CHECK_FALSE(off.final_pass);
}

TEST_CASE("total variation against the oracle law") {
  LatticeLaw law;
  law.time = 1.0;
  law.window.dim = 1;
  law.window.lo = {0, 0};
  law.window.hi = {1, 0};
  law.mass = {std::exp(-1.0), 1.0 - std::exp(-1.0)};

  LatticeHistogram same;
  same[{0, 0}] = law.mass[0];
  same[{1, 0}] = law.mass[1];
  CHECK(compare_lattice(same, law) == doctest::Approx(0.0).epsilon(1e-15));

  LatticeHistogram shifted;
  shifted[{5, 0}] = 1.0;  // disjoint support
  CHECK(compare_lattice(shifted, law) == doctest::Approx(1.0).epsilon(1e-12));

  LatticeHistogram half;
  half[{0, 0}] = 0.5;
  half[{1, 0}] = 0.5;
  const double expected = std::abs(0.5 - law.mass[0]);
  CHECK(compare_lattice(half, law) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("no-delay counting law matches its oracle in total variation") {
  const auto q = StripMeasure::atomic({{1.0, 0.0, {1.0}}});
  const auto policy = RatePolicy::constant_one();
  const auto evolution =
      solve_lattice(q, policy, {{{0, 0}, 1.0}}, 1, 3.0, 1e-3);
  const InitialCondition init{JumpMarginal::point({0.0}), false};
  const auto ens =
      simulate_ensemble(q, policy, init, 3.0, {3.0}, 50'000, 71, 1);
  const auto histogram = histogram_from_samples(samples_at_probe(ens, 0));
  CHECK(compare_lattice(histogram, evolution.marginal_law(3.0)) <= 0.02);
}

TEST_CASE("the two recentrings differ by the computed constant") {
  // hyperbolic transport: H(t) deviates from -K t by an O(1) amount, and the
  // two rescalings must differ per trajectory by exactly (H(t) + K t)/sqrt(t)
  const auto q = StripMeasure::product_coupled(
      ThetaMeasure::point(-1.0), [](double th, double* out) { out[0] = th; },
      1, "linear");
  const auto policy = RatePolicy::hyperbolic_dde(
      1.01, 1.0, ThetaMeasure::point(-1.0), [](double) { return 1.0; }, 50.0);
  const auto c = compute_constants(q, policy);
  const auto path = recentring_path(q, policy, 50.0, 0.01);
  const InitialCondition init{JumpMarginal::uniform_box({0.0}, {1.0}), false};
  const auto ens = simulate_ensemble(q, policy, init, 50.0, {50.0}, 200, 81, 1);

  const double t = 50.0;
  const Samples x = samples_at_probe(ens, 0);
  const Samples z_drift = rescale(x, t, c.drift);
  const Samples z_path = rescale_shifted(x, t, path.value(t));
  const double expected =
      (path.value(t)[0] + c.drift[0] * t) / std::sqrt(t);
  CHECK(std::abs(expected) > 1e-4);  // the shift is genuinely nonzero here
  for (std::size_t i = 0; i < x.n; ++i) {
    CHECK(z_path.data[i] - z_drift.data[i] ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("a singular sample cloud is reported, not fatal") {
  const auto c = unit_delay_constants();
  const LimitLaw law = limit_law(c);
  Samples z;
  z.dim = 1;
  z.n = 500;
  z.data.assign(z.n, 0.25);  // zero variance against a nondegenerate law
  const GofReport report = gof_gaussian(z, law);
  CHECK(report.covariance_singular);
  CHECK_FALSE(report.pass);
}

TEST_CASE("histograms reject non-integer samples") {
  CHECK_THROWS_AS(histogram_from_samples(make_samples({0.5})), NumericError);
  const auto h = histogram_from_samples(make_samples({1.0, 1.0, 2.0, -3.0}));
  CHECK(h.at({1, 0}) == doctest::Approx(0.5));
  CHECK(h.at({2, 0}) == doctest::Approx(0.25));
  CHECK(h.at({-3, 0}) == doctest::Approx(0.25));
}

TEST_CASE("statistics are invariant under sample permutation") {
  Rng rng(11);
  std::vector<double> values(5000);
  for (auto& v : values) v = rng.normal();
  const double ks1 =
      ks_statistic(values, [](double x) { return normal_cdf(x); });
  std::vector<double> shuffled = values;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform() * double(i + 1));
    std::swap(shuffled[i], shuffled[j]);
  }
  const double ks2 =
      ks_statistic(shuffled, [](double x) { return normal_cdf(x); });
  CHECK(ks1 == ks2);
  const MomentSummary m1 = moment_summary(values);
  const MomentSummary m2 = moment_summary(shuffled);
  CHECK(m1.mean == doctest::Approx(m2.mean).epsilon(1e-14));
  CHECK(m1.variance == doctest::Approx(m2.variance).epsilon(1e-14));
}

TEST_CASE("reference distribution functions") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(0.0, 0.0, 0.125) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {0.5, 1.0, 3.0, 7.0}) {
    CHECK(chi_squared_cdf(x, 2.0) ==
          doctest::Approx(1.0 - std::exp(-0.5 * x)).epsilon(1e-12));
  }
  CHECK(ks_critical_value(10'000, 0.01) ==
        doctest::Approx(std::sqrt(-0.5 * std::log(0.005)) / 100.0).epsilon(1e-12));
  // gamma_p sanity: P(1/2, x/2) is the chi-squared(1) CDF = erf(sqrt(x/2))
  CHECK(chi_squared_cdf(1.0, 1.0) ==
        doctest::Approx(std::erf(std::sqrt(0.5))).epsilon(1e-12));
}
