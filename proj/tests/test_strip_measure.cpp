#include <cmath>
#include <vector>

#include <doctest.h>

#include "djp/errors.hpp"
#include "djp/stats.hpp"
#include "djp/strip_measure.hpp"

using namespace djp;

namespace {

StripMeasure unit_delay_unit_jump() {
  return StripMeasure::atomic({{1.0, -1.0, {1.0}}});
}

StripMeasure unit_delay_uniform_jump() {
  return StripMeasure::product(ThetaMeasure::point(-1.0),
                               JumpMarginal::uniform_box({-0.5}, {0.5}));
}

}  // namespace

TEST_CASE("moments of point-mass measures") {
  const auto q = unit_delay_unit_jump();
  CHECK(q.moment0([](double th) { return -th; }) == doctest::Approx(1.0).epsilon(1e-14));

  const auto q0 = StripMeasure::atomic({{1.0, 0.0, {1.0}}});
  CHECK(q0.moment1([](double) { return 1.0; })[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("second moment of the uniform jump marginal") {
  const auto q = unit_delay_uniform_jump();
  const Mat m2 = q.moment2([](double) { return 1.0; });
  CHECK(m2(0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

  // Monte Carlo cross-check of the closed form.
  Rng rng(2024);
  const std::size_t n = 1'000'000;
  double acc = 0.0, acc2 = 0.0;
  Vec z(1);
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q.sample_into(rng, theta, z.data());
    const double v = z[0] * z[0];
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / n;
  const double sd = std::sqrt(acc2 / n - mean * mean);
  CHECK(std::abs(mean - 1.0 / 12.0) <= 4.0 * sd / std::sqrt(double(n)));
}

TEST_CASE("sampling a point mass is deterministic") {
  const auto q = unit_delay_unit_jump();
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto [theta, z] = q.sample(rng);
    CHECK(theta == -1.0);
    CHECK(z[0] == 1.0);
  }
}

TEST_CASE("atomic sampling frequencies match the weights") {
  const auto q = StripMeasure::atomic({{0.25, 0.0, {0.0}}, {0.75, -1.0, {1.0}}});
  Rng rng(7);
  const std::size_t n = 100'000;
  std::size_t delayed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [theta, z] = q.sample(rng);
    if (theta == -1.0) ++delayed;
  }
  CHECK(std::abs(double(delayed) / n - 0.75) <= 0.01);
}

TEST_CASE("uniform jump sample mean is centred") {
  const auto q = unit_delay_uniform_jump();
  Rng rng(11);
  const std::size_t n = 100'000;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += q.sample(rng).second[0];
  CHECK(std::abs(acc / n) <= 0.005);
}

TEST_CASE("gaussian marginal moments and sampler agree") {
  Mat cov(2, 2);
  cov(0, 0) = 2.0;
  cov(1, 1) = 0.5;
  cov(0, 1) = cov(1, 0) = 0.3;
  const auto jump = JumpMarginal::gaussian({1.0, -2.0}, cov);
  CHECK(jump.second_moment()(0, 0) == doctest::Approx(2.0 + 1.0).epsilon(1e-14));
  CHECK(jump.second_moment()(0, 1) == doctest::Approx(0.3 + -2.0).epsilon(1e-12));

  Rng rng(3);
  const std::size_t n = 200'000;
  double m0 = 0.0, m1 = 0.0, c01 = 0.0;
  Vec z(2);
  for (std::size_t i = 0; i < n; ++i) {
    jump.sample_into(rng, z.data());
    m0 += z[0];
    m1 += z[1];
    c01 += z[0] * z[1];
  }
  m0 /= n;
  m1 /= n;
  CHECK(std::abs(m0 - 1.0) <= 0.02);
  CHECK(std::abs(m1 + 2.0) <= 0.01);
  CHECK(std::abs(c01 / n - (0.3 - 2.0)) <= 0.03);
}

TEST_CASE("constant tilt leaves the law unchanged") {
  // density theta marginal so the KS comparison is meaningful
  const auto q = StripMeasure::product(
      ThetaMeasure::density([](double) { return 1.0; }, "uniform"),
      JumpMarginal::point({1.0}));
  Rng rng(5);
  const std::size_t n = 100'000;
  std::vector<double> plain(n), tilted(n);
  Vec z(1);
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q.sample_into(rng, theta, z.data());
    plain[i] = theta;
  }
  for (std::size_t i = 0; i < n; ++i) {
    q.sample_tilted_into([](double) { return 0.7; }, 0.7, rng, theta, z.data());
    tilted[i] = theta;
  }
  CHECK(ks_two_sample(plain, tilted) <= 0.02);
}

TEST_CASE("exponential tilt reweights atoms by the expected ratio") {
  const auto q = StripMeasure::atomic({{0.5, 0.0, {0.0}}, {0.5, -1.0, {1.0}}});
  Rng rng(13);
  const std::size_t n = 100'000;
  std::size_t delayed = 0;
  Vec z(1);
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q.sample_tilted_into([](double th) { return std::exp(th); }, 1.0, rng,
                         theta, z.data());
    if (theta == -1.0) ++delayed;
  }
  const double expected = std::exp(-1.0) / (1.0 + std::exp(-1.0));
  CHECK(std::abs(double(delayed) / n - expected) <= 0.01);
}

TEST_CASE("tilting a point mass returns the point") {
  const auto q = unit_delay_unit_jump();
  Rng rng(17);
  const auto [theta, z] =
      q.sample_tilted([](double th) { return 2.0 + th; }, 2.0, rng);
  CHECK(theta == -1.0);
  CHECK(z[0] == 1.0);
}

TEST_CASE("categorical and forced-rejection tilts agree in law") {
  const auto q = StripMeasure::atomic(
      {{0.2, -0.25, {0.0}}, {0.5, -0.5, {1.0}}, {0.3, -1.0, {2.0}}});
  auto w = [](double th) { return std::exp(2.0 * th); };
  Rng rng(19);
  const std::size_t n = 50'000;
  std::vector<double> cat(n), rej(n);
  Vec z(1);
  double theta = 0.0;
  TiltStats stats;
  for (std::size_t i = 0; i < n; ++i) {
    q.sample_tilted_into(w, 1.0, rng, theta, z.data(), nullptr,
                         TiltMethod::Auto);
    cat[i] = theta;
  }
  for (std::size_t i = 0; i < n; ++i) {
    q.sample_tilted_into(w, 1.0, rng, theta, z.data(), &stats,
                         TiltMethod::ForceRejection);
    rej[i] = theta;
  }
  CHECK(stats.accepted == n);
  CHECK(stats.proposals > n);  // rejection path really ran
  CHECK(ks_two_sample(cat, rej) <= ks_two_sample_critical_value(n, n, 0.01));
}

TEST_CASE("tilt envelope violations are hard errors") {
  const auto q = StripMeasure::product(
      ThetaMeasure::density([](double) { return 1.0; }, "uniform"),
      JumpMarginal::point({1.0}));
  Rng rng(23);
  Vec z(1);
  double theta = 0.0;
  CHECK_THROWS_AS(q.sample_tilted_into([](double th) { return 1.0 - th; }, 1.0,
                                       rng, theta, z.data()),
                  NumericError);
}

TEST_CASE("total mass is one for every constructible form") {
  std::vector<StripMeasure> measures;
  measures.push_back(unit_delay_unit_jump());
  measures.push_back(unit_delay_uniform_jump());
  measures.push_back(StripMeasure::atomic(
      {{0.2, -0.25, {0.0}}, {0.5, -0.5, {1.0}}, {0.3, -1.0, {2.0}}}));
  measures.push_back(StripMeasure::product(
      ThetaMeasure::density([](double) { return 1.0; }, "uniform"),
      JumpMarginal::gaussian({0.0}, [] {
        Mat c(1, 1);
        c(0, 0) = 2.0;
        return c;
      }())));
  measures.push_back(StripMeasure::product_coupled(
      ThetaMeasure::point(-1.0),
      [](double th, double* out) { out[0] = 0.5 * th; }, 1, "linear"));
  for (const auto& q : measures)
    CHECK(std::abs(q.moment0([](double) { return 1.0; }) - 1.0) <= 1e-12);
}

TEST_CASE("sampler and quadrature agree on weighted moments") {
  // f fixed across forms; checks each order at the Monte Carlo scale
  auto f = [](double th) { return std::exp(th); };
  std::vector<StripMeasure> measures;
  measures.push_back(unit_delay_uniform_jump());
  measures.push_back(StripMeasure::atomic(
      {{0.2, -0.25, {0.0}}, {0.5, -0.5, {1.0}}, {0.3, -1.0, {2.0}}}));
  measures.push_back(StripMeasure::product(
      ThetaMeasure::density([](double) { return 1.0; }, "uniform"),
      JumpMarginal::uniform_box({-1.0}, {2.0})));
  measures.push_back(StripMeasure::product_coupled(
      ThetaMeasure::density([](double) { return 1.0; }, "uniform"),
      [](double th, double* out) { out[0] = -2.0 * th; }, 1, "linear"));

  Rng rng(29);
  const std::size_t n = 1'000'000;
  for (const auto& q : measures) {
    const double exact0 = q.moment0(f);
    const double exact1 = q.moment1(f)[0];
    const double exact2 = q.moment2(f)(0, 0);
    double a0 = 0, a1 = 0, a2 = 0, s0 = 0, s1 = 0, s2 = 0;
    Vec z(1);
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q.sample_into(rng, theta, z.data());
      const double w = f(theta);
      const double v0 = w, v1 = w * z[0], v2 = w * z[0] * z[0];
      a0 += v0;
      a1 += v1;
      a2 += v2;
      s0 += v0 * v0;
      s1 += v1 * v1;
      s2 += v2 * v2;
    }
    const double root_n = std::sqrt(double(n));
    auto band = [&](double acc, double acc2) {
      const double mean = acc / n;
      return 4.0 * std::sqrt(std::max(acc2 / n - mean * mean, 1e-30)) / root_n;
    };
    CHECK(std::abs(a0 / n - exact0) <= band(a0, s0) + 1e-9);
    CHECK(std::abs(a1 / n - exact1) <= band(a1, s1) + 1e-9);
    CHECK(std::abs(a2 / n - exact2) <= band(a2, s2) + 1e-9);
  }
}

TEST_CASE("construction rejects invalid measures") {
  CHECK_THROWS_AS(StripMeasure::atomic({{0.5, -1.0, {1.0}}}), ConfigError);
  CHECK_THROWS_AS(StripMeasure::atomic({{1.0, -1.5, {1.0}}}), ConfigError);
  CHECK_THROWS_AS(StripMeasure::atomic({{1.0, 0.5, {1.0}}}), ConfigError);
  CHECK_THROWS_AS(
      StripMeasure::atomic({{1.0 - 1e-16, -1.0, {1.0}}, {1e-16, 0.0, {0.0}}}),
      ConfigError);
  CHECK_THROWS_AS(StripMeasure::atomic({{1.0, -1.0, {1.0}}, {1.0, 0.0, {}}}),
                  ConfigError);
  CHECK_THROWS_AS(JumpMarginal::uniform_box({1.0}, {0.0}), ConfigError);
  CHECK_THROWS_AS(ThetaMeasure::density([](double) { return 2.0; }, "bad"),
                  ConfigError);
}

TEST_CASE("density theta sampling matches its CDF") {
  const double rate = 1.5;
  const double norm = rate / (1.0 - std::exp(-rate));
  const auto q = StripMeasure::product(
      ThetaMeasure::density(
          [=](double th) { return norm * std::exp(rate * th); }, "exp"),
      JumpMarginal::point({0.0}));
  Rng rng(31);
  const std::size_t n = 100'000;
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = q.sample(rng).first;
  auto cdf = [=](double th) {
    return (std::exp(rate * (th + 1.0)) - 1.0) / (std::exp(rate) - 1.0);
  };
  CHECK(ks_statistic(samples, cdf) <= 1.5 * ks_critical_value(n, 0.01));
}
