#pragma once

#include <array>
#include <map>
#include <vector>

#include "djp/asymptotics.hpp"
#include "djp/lattice.hpp"
#include "djp/simulator.hpp"
#include "djp/stats.hpp"

namespace djp {

// Column-extracted samples: n rows of dimension dim.
struct Samples {
  int dim = 0;
  std::size_t n = 0;
  std::vector<double> data;

  const double* row(std::size_t i) const { return data.data() + i * dim; }
  double* row(std::size_t i) { return data.data() + i * dim; }
  std::vector<double> component(int d) const;
};

Samples samples_at_probe(const EnsembleResult& ensemble, std::size_t probe);

// Z = sqrt(t) (X(t)/t - K) applied per sample.
Samples rescale(const Samples& x, double t, const Vec& drift);
// Z = (X(t) + H(t)) / sqrt(t), the shifted-path variant.
Samples rescale_shifted(const Samples& x, double t, const Vec& shift);

struct GofTolerances {
  double ks = 0.08;
  double mean_abs = 0.02;
  double var_abs = 0.01;
  double kernel_abs = 0.0;  // kernel axes must vanish exactly by default
};

struct AxisGof {
  double variance_expected = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis_excess = 0.0;
  double ks = 0.0;
};

// Goodness-of-fit of rescaled samples against the limit law: per-range-axis
// KS and moments in the rotated frame, exact-zero check on kernel axes, and a
// KS of the squared Mahalanobis norm against chi-squared.
struct GofReport {
  std::size_t n = 0;
  Vec mean;
  Mat covariance;
  std::vector<AxisGof> range_axes;
  double kernel_max_abs = 0.0;
  double mahalanobis_ks = 0.0;
  bool covariance_singular = false;

  GofTolerances tolerances;
  bool ks_pass = false;
  bool mean_pass = false;
  bool var_pass = false;
  bool kernel_pass = false;
  bool pass = false;
};

GofReport gof_gaussian(const Samples& z, const LimitLaw& law,
                       const GofTolerances& tol = {});

// Law-of-large-numbers check across increasing probe times: the final probe's
// confidence band must cover the drift and the error sequence must not grow
// beyond noise.
struct LlnProbe {
  double t = 0.0;
  Vec mean_ratio;   // mean of X(t)/t
  double error = 0.0;  // |mean_ratio - drift|
  double band = 0.0;   // tolerance at this probe
};

struct LlnReport {
  std::vector<LlnProbe> probes;
  bool final_pass = false;
  bool monotone_pass = false;
  bool pass = false;
};

struct LlnTolerance {
  double sigma_multiple = 3.0;
  double covariance_trace = 1.0;  // trace of the limit covariance
};

LlnReport check_lln(const EnsembleResult& ensemble, const Vec& drift,
                    const LlnTolerance& tol);

// Histogram over integer lattice points.
using LatticeHistogram = std::map<std::array<int, 2>, double>;

LatticeHistogram histogram_from_samples(const Samples& x);

// Total-variation distance between an empirical histogram and the lattice
// oracle law, summed over the union of supports.
double compare_lattice(const LatticeHistogram& histogram, const LatticeLaw& law);

enum class Recentring { DriftTimesT, Path };

struct SelfSimilarReport {
  std::vector<double> probe_times;
  std::vector<GofReport> reports;
  bool ks_trend_pass = false;  // non-increasing within slack
  double trend_slack = 0.02;
};

SelfSimilarReport selfsimilar_profile(const EnsembleResult& ensemble,
                                      const AsymptoticConstants& constants,
                                      const LimitLaw& law,
                                      Recentring recentring,
                                      const RecentringPath* path,
                                      const GofTolerances& tol = {},
                                      double trend_slack = 0.02);

}  // namespace djp
