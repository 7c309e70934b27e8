#pragma once

#include <functional>
#include <vector>

namespace djp {

double normal_cdf(double x, double mean = 0.0, double variance = 1.0);

// Regularized lower incomplete gamma P(a,x).
double gamma_p(double a, double x);

double chi_squared_cdf(double x, double dof);

// One-sample Kolmogorov-Smirnov distance sup |F_n - F| against a continuous
// reference CDF. Sorts a copy of the samples.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Two-sample KS distance; ties are walked through before the gap is measured,
// so lattice-valued samples are handled correctly.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic critical values: reject at level alpha when the statistic
// exceeds these.
double ks_critical_value(std::size_t n, double alpha);
double ks_two_sample_critical_value(std::size_t n, std::size_t m, double alpha);

struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double kurtosis_excess = 0.0;
};

MomentSummary moment_summary(const std::vector<double>& samples);

// Pearson chi-squared goodness of fit for binned counts; bins with expected
// count below min_expected are pooled with their neighbour. Returns the
// p-value.
double chi_squared_gof_pvalue(const std::vector<double>& observed,
                              const std::vector<double>& expected,
                              double min_expected = 5.0);

}  // namespace djp
