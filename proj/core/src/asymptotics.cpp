#include "djp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "djp/errors.hpp"

namespace djp {

AsymptoticConstants compute_constants(const StripMeasure& q,
                                      const RatePolicy& policy) {
  const int dim = q.dimension();
  auto alpha_inf = [&policy](double th) { return policy.limit(th); };

  AsymptoticConstants c;
  c.dimension = dim;
  c.delay_mass = q.moment0([&](double th) { return -th * alpha_inf(th); });
  c.lambda_inf = policy.lambda_inf(q);

  const Vec drift_raw = q.moment1(alpha_inf);
  const double scale = 1.0 + c.delay_mass;
  c.drift.resize(dim);
  for (int i = 0; i < dim; ++i) c.drift[i] = drift_raw[i] / scale;

  // D0 = int alpha_inf zz^T + K m1^T + m1 K^T + m2 K K^T with
  // m1 = int theta alpha_inf z Q and m2 = int theta^2 alpha_inf Q.
  const Mat zz = q.moment2(alpha_inf);
  const Vec m1 = q.moment1([&](double th) { return th * alpha_inf(th); });
  const double m2 = q.moment0([&](double th) { return th * th * alpha_inf(th); });
  c.diffusion = Mat(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      c.diffusion(i, j) = zz(i, j) + c.drift[i] * m1[j] + m1[i] * c.drift[j] +
                          m2 * c.drift[i] * c.drift[j];

  c.covariance = Mat(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) c.covariance(i, j) = c.diffusion(i, j) / scale;

  SymmetricEigen eig = symmetric_eigen(c.covariance);
  double trace = 0.0;
  for (int i = 0; i < dim; ++i) trace += c.covariance(i, i);
  const double cutoff = 1e-12 * trace;

  c.spectral.principal_axes = eig.vectors.transposed();
  c.spectral.eigenvalues = eig.values;
  c.spectral.kernel_dim = 0;
  for (int i = 0; i < dim; ++i) {
    if (c.spectral.eigenvalues[i] <= cutoff) {
      c.spectral.eigenvalues[i] = 0.0;
      ++c.spectral.kernel_dim;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// LimitLaw

LimitLaw::LimitLaw(SpectralDecomposition spectral)
    : spectral_(std::move(spectral)) {}

Vec LimitLaw::sample(Rng& rng) const {
  const int n = dimension();
  Vec rotated(n, 0.0);
  for (int i = 0; i < n - spectral_.kernel_dim; ++i)
    rotated[i] = std::sqrt(spectral_.eigenvalues[i]) * rng.normal();
  // x = P^T y
  Vec x(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      x[i] += spectral_.principal_axes(j, i) * rotated[j];
  return x;
}

double LimitLaw::axis_cdf(int axis, double y) const {
  if (axis < 0 || axis >= range_dim())
    throw ConfigError("axis_cdf: not a range axis");
  return 0.5 * std::erfc(-y / std::sqrt(2.0 * spectral_.eigenvalues[axis]));
}

Vec LimitLaw::rotate(const Vec& x) const {
  return mat_vec(spectral_.principal_axes, x);
}

double LimitLaw::log_density(const Vec& x, double kernel_tol) const {
  const Vec y = rotate(x);
  double acc = 0.0;
  const int r = range_dim();
  for (int i = 0; i < dimension(); ++i) {
    if (i < r) {
      const double lam = spectral_.eigenvalues[i];
      constexpr double two_pi = 6.283185307179586476925286766559;
      acc += -0.5 * y[i] * y[i] / lam - 0.5 * std::log(two_pi * lam);
    } else if (std::abs(y[i]) > kernel_tol) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return acc;
}

LimitLaw limit_law(const AsymptoticConstants& constants) {
  return LimitLaw(constants.spectral);
}

// ---------------------------------------------------------------------------
// RecentringPath

RecentringPath::RecentringPath(const StripMeasure& q, const RatePolicy& policy,
                               double horizon, double grid_step) {
  if (!(horizon > 0.0)) throw ConfigError("recentring horizon must be positive");
  if (!(grid_step > 0.0)) throw ConfigError("recentring grid step must be positive");

  dim_ = q.dimension();
  step_ = grid_step;
  horizon_ = horizon;

  const double delay_mass =
      q.moment0([&](double th) { return -th * policy.limit(th); });
  const double scale = 1.0 + delay_mass;

  auto integrand = [&](double s, double* out) {
    const double clamped = std::max(s, 0.0);
    const Vec v =
        q.moment1([&](double th) { return policy.evaluate(clamped, th); });
    for (int i = 0; i < dim_; ++i) out[i] = -v[i] / scale;
  };

  negative_nodes_ = static_cast<std::size_t>(std::ceil(1.0 / step_ - 1e-12));
  const std::size_t positive_nodes =
      static_cast<std::size_t>(std::ceil(horizon / step_ - 1e-12));
  const std::size_t total = negative_nodes_ + positive_nodes + 1;
  table_.assign(total * dim_, 0.0);

  Vec a(dim_), mid(dim_), b(dim_);
  // forward from 0 with per-cell Simpson
  for (std::size_t k = 0; k < positive_nodes; ++k) {
    const double t = k * step_;
    integrand(t, a.data());
    integrand(t + 0.5 * step_, mid.data());
    integrand(t + step_, b.data());
    const std::size_t at = (negative_nodes_ + k) * dim_;
    for (int i = 0; i < dim_; ++i)
      table_[at + dim_ + i] =
          table_[at + i] + (step_ / 6.0) * (a[i] + 4.0 * mid[i] + b[i]);
  }
  // backward onto [-1, 0)
  for (std::size_t k = 0; k < negative_nodes_; ++k) {
    const double t = -static_cast<double>(k) * step_;
    integrand(t, a.data());
    integrand(t - 0.5 * step_, mid.data());
    integrand(t - step_, b.data());
    const std::size_t at = (negative_nodes_ - k) * dim_;
    for (int i = 0; i < dim_; ++i)
      table_[at - dim_ + i] =
          table_[at + i] - (step_ / 6.0) * (a[i] + 4.0 * mid[i] + b[i]);
  }
}

Vec RecentringPath::value(double t) const {
  if (t < -1.0 - 1e-9 || t > horizon_ + 1e-9)
    throw ConfigError("recentring path queried outside [-1, horizon]");
  const double pos = (std::clamp(t, -1.0, horizon_) + negative_nodes_ * step_) / step_;
  std::size_t i = static_cast<std::size_t>(pos);
  const std::size_t last = table_.size() / dim_ - 1;
  if (i >= last) i = last - 1;
  const double s = pos - static_cast<double>(i);
  Vec out(dim_);
  for (int d = 0; d < dim_; ++d)
    out[d] = (1.0 - s) * table_[i * dim_ + d] + s * table_[(i + 1) * dim_ + d];
  return out;
}

Vec RecentringPath::shift_between(double t, double theta) const {
  const Vec ht = value(t);
  const Vec hs = value(t + theta);
  Vec out(dim_);
  for (int d = 0; d < dim_; ++d) out[d] = ht[d] - hs[d];
  return out;
}

RecentringPath recentring_path(const StripMeasure& q, const RatePolicy& policy,
                               double horizon, double grid_step) {
  const double step =
      grid_step > 0.0 ? grid_step : std::min(0.01, horizon / 1e4);
  return RecentringPath(q, policy, horizon, step);
}

}  // namespace djp
