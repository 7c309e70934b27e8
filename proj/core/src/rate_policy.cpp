#include "djp/rate_policy.hpp"

#include <cmath>

#include "djp/errors.hpp"
#include "djp/quadrature.hpp"

namespace djp {

double sup_on_delay_interval(const std::function<double(double)>& f,
                             int scan_points) {
  double best = -1e300;
  int best_i = 0;
  for (int i = 0; i < scan_points; ++i) {
    const double t = -1.0 + static_cast<double>(i) / (scan_points - 1);
    const double v = f(t);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  // golden-section refinement on the bracket around the best scan point
  const double cell = 1.0 / (scan_points - 1);
  double lo = std::max(-1.0, -1.0 + (best_i - 1) * cell);
  double hi = std::min(0.0, -1.0 + (best_i + 1) * cell);
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

RatePolicy RatePolicy::constant_one() {
  RatePolicy p;
  p.kind_ = Kind::ConstantOne;
  return p;
}

RatePolicy RatePolicy::separable(std::function<double(double)> base,
                                 std::string base_label, double bound,
                                 double beta, double amplitude) {
  if (!(bound >= 0.0)) throw ConfigError("separable perturbation bound must be >= 0");
  if (!(beta > 0.0)) throw ConfigError("separable decay rate must be positive");
  if (std::abs(amplitude) > bound)
    throw ConfigError("separable perturbation amplitude exceeds its bound");

  RatePolicy p;
  p.kind_ = Kind::Separable;
  p.base_ = std::move(base);
  p.base_label_ = std::move(base_label);
  p.bound_ = bound;
  p.beta_ = beta;
  p.amplitude_ = amplitude;
  p.base_sup_ = sup_on_delay_interval(p.base_);

  const double base_inf = -sup_on_delay_interval(
      [&p](double t) { return -p.base_(t); });
  if (!(base_inf > 0.0))
    throw ConfigError("separable limit profile must be strictly positive");
  if (amplitude < 0.0 && base_inf + amplitude <= 0.0)
    throw ConfigError("separable rate family is not positive for small t");
  return p;
}

RatePolicy RatePolicy::hyperbolic_dde(double a, double b, ThetaMeasure eta,
                                      std::function<double(double)> history,
                                      double horizon, double dde_step) {
  if (!(a > 0.0)) throw ConfigError("hyperbolic rate needs a > 0");
  if (!(horizon > 0.0)) throw ConfigError("hyperbolic rate needs a positive horizon");

  RatePolicy p;
  p.kind_ = Kind::HyperbolicDde;
  p.a_ = a;
  p.b_ = b;

  // kernel a e^{-b theta} eta(d theta)
  std::shared_ptr<DelayKernel> kernel;
  if (eta.is_atomic()) {
    std::vector<DelayKernel::Atom> atoms;
    for (const auto& at : eta.atom_list())
      atoms.push_back({a * std::exp(-b * at.theta) * at.weight, at.theta});
    kernel = std::make_shared<DelayKernel>(DelayKernel::atoms(std::move(atoms)));
  } else {
    const auto pdf = eta.density_fn();
    auto weighted = [a, b, pdf](double t) { return std::exp(-b * t) * pdf(t); };
    const double mass = a * integrate_adaptive(weighted);
    auto normalized = [a, b, pdf, mass](double t) {
      return a * std::exp(-b * t) * pdf(t) / mass;
    };
    kernel = std::make_shared<DelayKernel>(DelayKernel::scaled(
        ThetaMeasure::density(normalized, "kernel:" + eta.label()), mass));
  }
  p.kernel_ = kernel;
  p.gamma_ = djp::dominant_root(*kernel);

  const double y0_at_0 = history(0.0);
  if (!(y0_at_0 > 0.0))
    throw ConfigError("hyperbolic rate needs history with y(0) > 0");
  double sup_hist = y0_at_0;
  for (int i = 0; i <= 1024; ++i)
    sup_hist = std::max(sup_hist, history(-1.0 + i / 1024.0));
  p.history_ratio_bound_ = sup_hist / y0_at_0;

  p.solution_ = std::make_shared<DenseSolution>(
      djp::solve(*kernel, std::move(history), horizon + 2.0, dde_step));
  return p;
}

double RatePolicy::evaluate(double t, double theta) const {
  switch (kind_) {
    case Kind::ConstantOne:
      return 1.0;
    case Kind::Separable:
      return base_(theta) + amplitude_ * std::exp(-beta_ * t);
    case Kind::HyperbolicDde: {
      const double yt = solution_->eval(t);
      return a_ * std::exp(-b_ * theta) * solution_->eval(t + theta) / yt;
    }
  }
  return 1.0;
}

double RatePolicy::limit(double theta) const {
  switch (kind_) {
    case Kind::ConstantOne:
      return 1.0;
    case Kind::Separable:
      return base_(theta);
    case Kind::HyperbolicDde:
      return a_ * std::exp((gamma_ - b_) * theta);
  }
  return 1.0;
}

double RatePolicy::sup_theta(double t) const {
  switch (kind_) {
    case Kind::ConstantOne:
      return 1.0;
    case Kind::Separable:
      return base_sup_ + std::max(amplitude_, 0.0) * std::exp(-beta_ * t);
    case Kind::HyperbolicDde:
      return sup_on_delay_interval(
          [this, t](double th) { return evaluate(t, th); });
  }
  return 1.0;
}

double RatePolicy::lambda_t(const StripMeasure& q, double t) const {
  if (kind_ == Kind::ConstantOne) return 1.0;
  const double value = q.moment0([this, t](double th) { return evaluate(t, th); });
  if (!(value > 0.0)) throw NumericError("intensity is not positive");
  return value;
}

double RatePolicy::lambda_inf(const StripMeasure& q) const {
  if (kind_ == Kind::ConstantOne) return 1.0;
  const double value = q.moment0([this](double th) { return limit(th); });
  if (!(value > 0.0))
    throw ConfigError("limit intensity must be strictly positive");
  return value;
}

double RatePolicy::envelope(const StripMeasure& q, double t0, double t1) const {
  if (!(t0 >= 0.0 && t1 > t0)) throw ConfigError("envelope window must satisfy 0 <= t0 < t1");
  switch (kind_) {
    case Kind::ConstantOne:
      return 1.0;
    case Kind::Separable:
      return lambda_inf(q) + bound_ * std::exp(-beta_ * t0);
    case Kind::HyperbolicDde: {
      // y is nondecreasing for nonnegative kernels, so y(s+theta)/y(s) <= 1
      // once s >= 1; before that the initial history caps the ratio.
      const double ratio = t0 < 1.0 ? std::max(1.0, history_ratio_bound_) : 1.0;
      const double weighted =
          q.moment0([this](double th) { return a_ * std::exp(-b_ * th); });
      return ratio * weighted;
    }
  }
  return 1.0;
}

const DenseSolution* RatePolicy::dde_solution() const {
  return kind_ == Kind::HyperbolicDde ? solution_.get() : nullptr;
}

double RatePolicy::dominant_root() const {
  if (kind_ != Kind::HyperbolicDde)
    throw ConfigError("dominant root is only defined for the hyperbolic rate");
  return gamma_;
}

const DelayKernel* RatePolicy::kernel() const {
  return kind_ == Kind::HyperbolicDde ? kernel_.get() : nullptr;
}

}  // namespace djp
