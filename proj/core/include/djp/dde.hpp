#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "djp/strip_measure.hpp"

namespace djp {

// Bounded positive Borel measure on [-1,0] driving the scalar linear delay
// equation y'(t) = int y(t+theta) K(d theta). Stored as a probability shape
// scaled by the total mass.
class DelayKernel {
 public:
  struct Atom {
    double mass;  // not normalized
    double theta;
  };

  static DelayKernel atoms(std::vector<Atom> atoms);
  static DelayKernel scaled(ThetaMeasure shape, double mass);

  double mass() const { return mass_; }
  const ThetaMeasure& shape() const { return shape_; }

  // int e^{theta z} K(d theta)
  double laplace(double z) const;
  std::complex<double> laplace(std::complex<double> z) const;
  // int theta e^{theta z} K(d theta)
  double laplace_theta(double z) const;

 private:
  DelayKernel(ThetaMeasure shape, double mass)
      : shape_(std::move(shape)), mass_(mass) {}

  ThetaMeasure shape_;
  double mass_ = 0.0;
};

// Fixed-step fourth-order solution with cubic Hermite dense output on
// [0, horizon]; the initial history function answers lookups on [-1,0].
class DenseSolution {
 public:
  double eval(double t) const;
  double deriv(double t) const;
  double horizon() const { return horizon_; }
  double step() const { return h_; }

 private:
  friend DenseSolution solve(const DelayKernel&, std::function<double(double)>,
                             double, double);

  double history(double t) const { return history_(t); }

  double h_ = 0.0;
  double horizon_ = 0.0;
  std::function<double(double)> history_;
  std::vector<double> y_;
  std::vector<double> f_;
};

// Method of steps with RK4. Kernel support strictly inside the current step
// (atoms in (-h,0), or density mass near zero) is handled by re-integrating
// each step against its own provisional Hermite interpolant until the step
// is self-consistent; an atom exactly at zero is instantaneous coupling and
// enters through the stage values.
DenseSolution solve(const DelayKernel& kernel,
                    std::function<double(double)> history, double horizon,
                    double step = 1e-3);

// Delta(z) = z - int e^{theta z} K(d theta); strictly increasing on the reals.
double characteristic_delta(double z, const DelayKernel& kernel);
std::complex<double> characteristic_delta(std::complex<double> z,
                                          const DelayKernel& kernel);

// The unique positive real root of Delta, bracketed by [0, mass] and polished
// by Newton steps. |Delta(root)| <= 1e-12 on return.
double dominant_root(const DelayKernel& kernel);

// y(t+theta)/y(t), the quantity converging to e^{gamma theta}.
double ratio_profile(const DenseSolution& sol, double t, double theta);

}  // namespace djp
