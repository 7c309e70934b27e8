#include "djp/verify.hpp"

#include <algorithm>
#include <cmath>

#include "djp/errors.hpp"

namespace djp {

std::vector<double> Samples::component(int d) const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = data[i * dim + d];
  return out;
}

Samples samples_at_probe(const EnsembleResult& ensemble, std::size_t probe) {
  if (probe >= ensemble.probes.size())
    throw ConfigError("probe index out of range");
  Samples s;
  s.dim = ensemble.dimension;
  s.n = ensemble.trajectories;
  s.data.resize(s.n * s.dim);
  for (std::size_t i = 0; i < s.n; ++i)
    for (int d = 0; d < s.dim; ++d)
      s.data[i * s.dim + d] = ensemble.at(i, probe, d);
  return s;
}

Samples rescale(const Samples& x, double t, const Vec& drift) {
  if (!(t > 0.0)) throw ConfigError("rescale needs t > 0");
  const double root = std::sqrt(t);
  Samples z = x;
  for (std::size_t i = 0; i < z.n; ++i)
    for (int d = 0; d < z.dim; ++d)
      z.data[i * z.dim + d] = root * (x.data[i * x.dim + d] / t - drift[d]);
  return z;
}

Samples rescale_shifted(const Samples& x, double t, const Vec& shift) {
  if (!(t > 0.0)) throw ConfigError("rescale needs t > 0");
  const double root = std::sqrt(t);
  Samples z = x;
  for (std::size_t i = 0; i < z.n; ++i)
    for (int d = 0; d < z.dim; ++d)
      z.data[i * z.dim + d] = (x.data[i * x.dim + d] + shift[d]) / root;
  return z;
}

GofReport gof_gaussian(const Samples& z, const LimitLaw& law,
                       const GofTolerances& tol) {
  if (z.n < 100) throw ConfigError("goodness of fit needs at least 100 samples");
  const int dim = z.dim;
  GofReport report;
  report.n = z.n;
  report.tolerances = tol;

  report.mean.assign(dim, 0.0);
  for (std::size_t i = 0; i < z.n; ++i)
    for (int d = 0; d < dim; ++d) report.mean[d] += z.data[i * dim + d];
  for (int d = 0; d < dim; ++d) report.mean[d] /= static_cast<double>(z.n);

  report.covariance = Mat(dim, dim);
  for (std::size_t i = 0; i < z.n; ++i)
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        report.covariance(a, b) += (z.data[i * dim + a] - report.mean[a]) *
                                   (z.data[i * dim + b] - report.mean[b]);
  for (auto& v : report.covariance.a) v /= static_cast<double>(z.n - 1);

  // sample covariance rank check against the law's range dimension
  if (law.range_dim() > 0) {
    const SymmetricEigen eig = symmetric_eigen(report.covariance);
    if (eig.values[std::max(law.range_dim() - 1, 0)] <= 0.0)
      report.covariance_singular = true;
  }

  // rotate into the principal frame
  const int r = law.range_dim();
  std::vector<std::vector<double>> rotated(dim);
  for (auto& v : rotated) v.reserve(z.n);
  Vec x(dim);
  for (std::size_t i = 0; i < z.n; ++i) {
    for (int d = 0; d < dim; ++d) x[d] = z.data[i * dim + d];
    const Vec y = law.rotate(x);
    for (int d = 0; d < dim; ++d) rotated[d].push_back(y[d]);
  }

  report.range_axes.resize(r);
  std::vector<double> mahalanobis(z.n, 0.0);
  for (int axis = 0; axis < r; ++axis) {
    AxisGof& ax = report.range_axes[axis];
    ax.variance_expected = law.axis_variance(axis);
    const MomentSummary m = moment_summary(rotated[axis]);
    ax.mean = m.mean;
    ax.variance = m.variance;
    ax.skewness = m.skewness;
    ax.kurtosis_excess = m.kurtosis_excess;
    const double lam = ax.variance_expected;
    ax.ks = ks_statistic(rotated[axis],
                         [lam](double v) { return normal_cdf(v, 0.0, lam); });
    for (std::size_t i = 0; i < z.n; ++i)
      mahalanobis[i] += rotated[axis][i] * rotated[axis][i] / lam;
  }

  report.kernel_max_abs = 0.0;
  for (int axis = r; axis < dim; ++axis)
    for (double v : rotated[axis])
      report.kernel_max_abs = std::max(report.kernel_max_abs, std::abs(v));

  if (r > 0) {
    const double dof = static_cast<double>(r);
    report.mahalanobis_ks = ks_statistic(
        mahalanobis, [dof](double x2) { return chi_squared_cdf(x2, dof); });
  }

  report.ks_pass = true;
  report.mean_pass = true;
  report.var_pass = true;
  for (const auto& ax : report.range_axes) {
    if (ax.ks > tol.ks) report.ks_pass = false;
    if (std::abs(ax.mean) > tol.mean_abs) report.mean_pass = false;
    if (std::abs(ax.variance - ax.variance_expected) > tol.var_abs)
      report.var_pass = false;
  }
  report.kernel_pass = report.kernel_max_abs <= tol.kernel_abs;
  report.pass = report.ks_pass && report.mean_pass && report.var_pass &&
                report.kernel_pass;
  return report;
}

LlnReport check_lln(const EnsembleResult& ensemble, const Vec& drift,
                    const LlnTolerance& tol) {
  LlnReport report;
  const int dim = ensemble.dimension;
  const double n = static_cast<double>(ensemble.trajectories);
  for (std::size_t p = 0; p < ensemble.probes.size(); ++p) {
    LlnProbe probe;
    probe.t = ensemble.probes[p];
    if (!(probe.t > 0.0)) throw ConfigError("LLN probes must be positive");
    probe.mean_ratio.assign(dim, 0.0);
    for (std::size_t i = 0; i < ensemble.trajectories; ++i)
      for (int d = 0; d < dim; ++d)
        probe.mean_ratio[d] += ensemble.at(i, p, d) / probe.t;
    double err = 0.0;
    for (int d = 0; d < dim; ++d) {
      probe.mean_ratio[d] /= n;
      err += (probe.mean_ratio[d] - drift[d]) * (probe.mean_ratio[d] - drift[d]);
    }
    probe.error = std::sqrt(err);
    probe.band = tol.sigma_multiple *
                 std::sqrt(tol.covariance_trace / (probe.t * n));
    report.probes.push_back(std::move(probe));
  }

  report.final_pass = report.probes.back().error <= report.probes.back().band;
  report.monotone_pass = true;
  for (std::size_t p = 1; p < report.probes.size(); ++p) {
    if (report.probes[p].error >
        report.probes[p - 1].error + report.probes[p].band)
      report.monotone_pass = false;
  }
  report.pass = report.final_pass && report.monotone_pass;
  return report;
}

LatticeHistogram histogram_from_samples(const Samples& x) {
  LatticeHistogram h;
  for (std::size_t i = 0; i < x.n; ++i) {
    std::array<int, 2> key{0, 0};
    for (int d = 0; d < x.dim; ++d) {
      const double v = x.data[i * x.dim + d];
      const double r = std::round(v);
      if (std::abs(v - r) > 1e-9)
        throw NumericError("sample is not lattice-valued");
      key[d] = static_cast<int>(r);
    }
    h[key] += 1.0;
  }
  const double n = static_cast<double>(x.n);
  for (auto& [key, count] : h) count /= n;
  return h;
}

double compare_lattice(const LatticeHistogram& histogram,
                       const LatticeLaw& law) {
  double tv = 0.0;
  for (const auto& [offset, p_hat] : histogram)
    tv += std::abs(p_hat - law.at(offset));
  // oracle mass on offsets never observed empirically
  for (std::size_t c = 0; c < law.mass.size(); ++c) {
    const auto offset = law.window.offset_of(c);
    if (histogram.find(offset) == histogram.end()) tv += law.mass[c];
  }
  return 0.5 * tv;
}

SelfSimilarReport selfsimilar_profile(const EnsembleResult& ensemble,
                                      const AsymptoticConstants& constants,
                                      const LimitLaw& law,
                                      Recentring recentring,
                                      const RecentringPath* path,
                                      const GofTolerances& tol,
                                      double trend_slack) {
  if (recentring == Recentring::Path && path == nullptr)
    throw ConfigError("path recentring needs a recentring path");
  SelfSimilarReport out;
  out.trend_slack = trend_slack;
  for (std::size_t p = 0; p < ensemble.probes.size(); ++p) {
    const double t = ensemble.probes[p];
    const Samples x = samples_at_probe(ensemble, p);
    Samples z;
    if (recentring == Recentring::DriftTimesT) {
      z = rescale(x, t, constants.drift);
    } else {
      z = rescale_shifted(x, t, path->value(t));
    }
    out.probe_times.push_back(t);
    out.reports.push_back(gof_gaussian(z, law, tol));
  }
  out.ks_trend_pass = true;
  auto worst_ks = [](const GofReport& r) {
    double ks = 0.0;
    for (const auto& ax : r.range_axes) ks = std::max(ks, ax.ks);
    return ks;
  };
  for (std::size_t p = 1; p < out.reports.size(); ++p) {
    if (worst_ks(out.reports[p]) >
        worst_ks(out.reports[p - 1]) + trend_slack)
      out.ks_trend_pass = false;
  }
  return out;
}

}  // namespace djp
