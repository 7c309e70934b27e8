#pragma once

#include <vector>

#include "djp/linalg.hpp"
#include "djp/rate_policy.hpp"
#include "djp/rng.hpp"
#include "djp/strip_measure.hpp"

namespace djp {

// Spectral form of the limit covariance: principal_axes has the eigenvectors
// as rows, so rotating a sample is y = P x and the covariance factors as
// P^T diag(eigenvalues) P. Axes are ordered by decreasing eigenvalue with the
// kernel (zero) axes last.
struct SpectralDecomposition {
  Mat principal_axes;
  Vec eigenvalues;
  int kernel_dim = 0;
};

// Closed-form constants of the long-time Gaussian behaviour:
//   delay_mass  Gamma = int (-theta) alpha_inf Q
//   drift       K = int alpha_inf z Q / (1 + Gamma)
//   diffusion   D0 = int alpha_inf (z + theta K)(z + theta K)^T Q
//   covariance  Sigma = D0 / (1 + Gamma)
struct AsymptoticConstants {
  int dimension = 0;
  double delay_mass = 0.0;
  Vec drift;
  double lambda_inf = 0.0;
  Mat diffusion;
  Mat covariance;
  SpectralDecomposition spectral;
};

AsymptoticConstants compute_constants(const StripMeasure& q,
                                      const RatePolicy& policy);

// Centred Gaussian on the range subspace, point mass on the kernel axes.
class LimitLaw {
 public:
  explicit LimitLaw(SpectralDecomposition spectral);

  int dimension() const { return spectral_.principal_axes.rows; }
  int kernel_dim() const { return spectral_.kernel_dim; }
  int range_dim() const { return dimension() - spectral_.kernel_dim; }
  const SpectralDecomposition& spectral() const { return spectral_; }

  Vec sample(Rng& rng) const;

  // CDF of the rotated coordinate on a range axis.
  double axis_cdf(int axis, double y) const;
  double axis_variance(int axis) const { return spectral_.eigenvalues[axis]; }

  // Log-density on the range subspace; -inf when x has a component on a
  // kernel axis beyond kernel_tol.
  double log_density(const Vec& x, double kernel_tol = 1e-9) const;

  Vec rotate(const Vec& x) const;  // y = P x

 private:
  SpectralDecomposition spectral_;
};

LimitLaw limit_law(const AsymptoticConstants& constants);

// Cumulative drift-compensation path
//   H(t) = -(1/(1+Gamma)) int_0^t int alpha(s, theta) z Q(d theta, dz) ds
// tabulated on a uniform grid and linearly interpolated. For s < 0 the rate
// is frozen at alpha(0, .).
class RecentringPath {
 public:
  RecentringPath(const StripMeasure& q, const RatePolicy& policy,
                 double horizon, double grid_step);

  Vec value(double t) const;  // H(t), t in [-1, horizon]
  // G(t, theta) = H(t) - H(t + theta)
  Vec shift_between(double t, double theta) const;
  double horizon() const { return horizon_; }
  double grid_step() const { return step_; }

 private:
  int dim_ = 0;
  double step_ = 0.0;
  double horizon_ = 0.0;
  std::size_t negative_nodes_ = 0;  // grid nodes covering [-1, 0)
  std::vector<double> table_;       // (negative_nodes_ + n + 1) x dim
};

RecentringPath recentring_path(const StripMeasure& q, const RatePolicy& policy,
                               double horizon, double grid_step = 0.0);

}  // namespace djp
