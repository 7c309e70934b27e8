#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "djp/dde.hpp"
#include "djp/strip_measure.hpp"

namespace djp {

// Jump-rate family alpha(t, theta) with its limit profile alpha_inf(theta),
// the total intensity lambda(t) against a strip measure, and upper envelopes
// for Poisson thinning. Immutable after construction and shareable across
// threads.
class RatePolicy {
 public:
  enum class Kind { ConstantOne, Separable, HyperbolicDde };

  static RatePolicy constant_one();

  // alpha(t, theta) = base(theta) + amplitude * e^{-beta t}, with
  // |amplitude| <= bound and the whole family bounded away from zero.
  static RatePolicy separable(std::function<double(double)> base,
                              std::string base_label, double bound,
                              double beta, double amplitude = 0.0);

  // alpha(t, theta) = a e^{-b theta} y(t+theta)/y(t) where y solves the delay
  // equation with kernel a e^{-b theta} eta(d theta). The dense solution is
  // cached through `horizon` plus one delay unit up front, so evaluation is
  // O(1) afterwards.
  static RatePolicy hyperbolic_dde(double a, double b, ThetaMeasure eta,
                                   std::function<double(double)> history,
                                   double horizon, double dde_step = 1e-3);

  Kind kind() const { return kind_; }

  double evaluate(double t, double theta) const;
  double limit(double theta) const;
  double sup_theta(double t) const;

  // lambda(t) = int alpha(t, theta) Q(d theta, dz)
  double lambda_t(const StripMeasure& q, double t) const;
  double lambda_inf(const StripMeasure& q) const;

  // Upper bound for lambda(s) on the window [t0, t1].
  double envelope(const StripMeasure& q, double t0, double t1) const;

  // HyperbolicDde accessors; null / throwing otherwise.
  const DenseSolution* dde_solution() const;
  double dominant_root() const;
  const DelayKernel* kernel() const;
  double coefficient_a() const { return a_; }
  double coefficient_b() const { return b_; }

 private:
  RatePolicy() = default;

  Kind kind_ = Kind::ConstantOne;

  // separable
  std::function<double(double)> base_;
  std::string base_label_;
  double bound_ = 0.0;
  double beta_ = 0.0;
  double amplitude_ = 0.0;
  double base_sup_ = 1.0;

  // hyperbolic
  double a_ = 0.0;
  double b_ = 0.0;
  std::shared_ptr<const DenseSolution> solution_;
  std::shared_ptr<const DelayKernel> kernel_;
  double gamma_ = 0.0;
  double history_ratio_bound_ = 1.0;  // sup y0 / y0(0)
};

// Maximum of a continuous function on [-1,0]: coarse scan plus golden-section
// refinement around the best bracket.
double sup_on_delay_interval(const std::function<double(double)>& f,
                             int scan_points = 129);

}  // namespace djp
