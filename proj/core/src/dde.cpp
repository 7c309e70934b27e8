#include "djp/dde.hpp"

#include <algorithm>
#include <cmath>

#include "djp/errors.hpp"
#include "djp/quadrature.hpp"

namespace djp {
namespace {

// Kernel split for the integrator: an instantaneous part (atom at zero) that
// couples through the stage values, and strictly delayed point masses.
// Density kernels are collapsed onto a fixed 256-point Gauss-Legendre rule.
struct KernelTerms {
  double instant = 0.0;
  std::vector<DelayKernel::Atom> delayed;
  bool inside_step = false;  // some delayed support lies in (-h, 0)
};

KernelTerms split_kernel(const DelayKernel& kernel, double h) {
  KernelTerms terms;
  const auto& shape = kernel.shape();
  if (shape.is_atomic()) {
    for (const auto& a : shape.atom_list()) {
      const double mass = a.weight * kernel.mass();
      if (a.theta == 0.0) {
        terms.instant += mass;
      } else {
        terms.delayed.push_back({mass, a.theta});
      }
    }
  } else {
    const auto& rule = gauss_legendre(256);
    const auto& pdf = shape.density_fn();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double th = rule.nodes[i];
      terms.delayed.push_back({kernel.mass() * rule.weights[i] * pdf(th), th});
    }
  }
  for (const auto& a : terms.delayed)
    if (-a.theta < h * (1.0 - 1e-12)) terms.inside_step = true;
  return terms;
}

double hermite_eval(double s, double h, double y0, double f0, double y1,
                    double f1) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
}

double hermite_deriv(double s, double h, double y0, double f0, double y1,
                     double f1) {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * f0 +
          (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * f1) /
         h;
}

}  // namespace

// ---------------------------------------------------------------------------
// DelayKernel

DelayKernel DelayKernel::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ConfigError("delay kernel needs at least one atom");
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (!(a.mass > 0.0)) throw ConfigError("delay kernel atom mass must be positive");
    if (!(a.theta >= -1.0 && a.theta <= 0.0))
      throw ConfigError("delay kernel support outside [-1,0]");
    mass += a.mass;
  }
  std::vector<ThetaMeasure::Atom> shape_atoms;
  shape_atoms.reserve(atoms.size());
  for (const auto& a : atoms) shape_atoms.push_back({a.mass / mass, a.theta});
  return DelayKernel(ThetaMeasure::atoms(std::move(shape_atoms)), mass);
}

DelayKernel DelayKernel::scaled(ThetaMeasure shape, double mass) {
  if (!(mass > 0.0)) throw ConfigError("delay kernel mass must be positive");
  return DelayKernel(std::move(shape), mass);
}

double DelayKernel::laplace(double z) const {
  return mass_ * shape_.integrate([z](double t) { return std::exp(t * z); });
}

std::complex<double> DelayKernel::laplace(std::complex<double> z) const {
  const double re = mass_ * shape_.integrate([z](double t) {
    return std::exp(t * z.real()) * std::cos(t * z.imag());
  });
  const double im = mass_ * shape_.integrate([z](double t) {
    return std::exp(t * z.real()) * std::sin(t * z.imag());
  });
  return {re, im};
}

double DelayKernel::laplace_theta(double z) const {
  return mass_ * shape_.integrate([z](double t) { return t * std::exp(t * z); });
}

// ---------------------------------------------------------------------------
// DenseSolution

double DenseSolution::eval(double t) const {
  if (t < 0.0) {
    if (t < -1.0 - 1e-12) throw NumericError("dense solution queried before -1");
    return history_(std::max(t, -1.0));
  }
  if (t > horizon_ + 1e-9)
    throw NumericError("dense solution queried beyond horizon");
  const double pos = std::min(t, horizon_) / h_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= y_.size()) i = y_.size() - 2;
  const double s = pos - static_cast<double>(i);
  return hermite_eval(s, h_, y_[i], f_[i], y_[i + 1], f_[i + 1]);
}

double DenseSolution::deriv(double t) const {
  if (t < 0.0 || t > horizon_ + 1e-9)
    throw NumericError("dense derivative queried outside [0, horizon]");
  const double pos = std::min(t, horizon_) / h_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= y_.size()) i = y_.size() - 2;
  const double s = pos - static_cast<double>(i);
  return hermite_deriv(s, h_, y_[i], f_[i], y_[i + 1], f_[i + 1]);
}

// ---------------------------------------------------------------------------
// solve

DenseSolution solve(const DelayKernel& kernel,
                    std::function<double(double)> history, double horizon,
                    double step) {
  if (!(horizon > 0.0)) throw ConfigError("dde horizon must be positive");
  if (!(step > 0.0)) throw ConfigError("dde step must be positive");
  const double per_unit = 1.0 / step;
  if (std::abs(per_unit - std::round(per_unit)) > 1e-9 * per_unit)
    throw ConfigError("dde step must divide the unit delay interval");

  const KernelTerms terms = split_kernel(kernel, step);
  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));

  DenseSolution sol;
  sol.h_ = step;
  sol.horizon_ = n_steps * step;
  sol.history_ = std::move(history);
  sol.y_.resize(n_steps + 1);
  sol.f_.resize(n_steps + 1);

  const auto& hist = sol.history_;
  const double y_at_0 = hist(0.0);
  if (y_at_0 < 0.0) throw ConfigError("dde history must be nonnegative at 0");

  // Provisional Hermite data for the step being integrated.
  double prov_t0 = 0.0, prov_y0 = 0.0, prov_f0 = 0.0, prov_y1 = 0.0,
         prov_f1 = 0.0;
  bool prov_valid = false;

  auto lookup = [&](double t) -> double {
    if (t <= 0.0) return hist(std::max(t, -1.0));
    const double pos = t / step;
    std::size_t i = static_cast<std::size_t>(pos + 1e-12);
    if (prov_valid && t > prov_t0 + 1e-15) {
      const double s = (t - prov_t0) / step;
      if (s > 0.0 && s <= 1.0 + 1e-12)
        return hermite_eval(std::min(s, 1.0), step, prov_y0, prov_f0, prov_y1,
                            prov_f1);
    }
    if (i >= sol.y_.size() - 1) i = sol.y_.size() - 2;
    const double s = pos - static_cast<double>(i);
    return hermite_eval(s, step, sol.y_[i], sol.f_[i], sol.y_[i + 1],
                        sol.f_[i + 1]);
  };

  auto delayed_forcing = [&](double t) {
    double acc = 0.0;
    for (const auto& a : terms.delayed) acc += a.mass * lookup(t + a.theta);
    return acc;
  };
  auto rhs = [&](double t, double y_stage) {
    return terms.instant * y_stage + delayed_forcing(t);
  };

  sol.y_[0] = y_at_0;
  sol.f_[0] = rhs(0.0, y_at_0);

  const int iterations = (terms.inside_step || !kernel.shape().is_atomic()) ? 3 : 1;

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = n * step;
    const double yn = sol.y_[n];
    const double fn = sol.f_[n];

    // first pass sees a linear extrapolation of the current interval
    prov_t0 = t;
    prov_y0 = yn;
    prov_f0 = fn;
    prov_y1 = yn + step * fn;
    prov_f1 = fn;
    prov_valid = iterations > 1;

    double y_next = yn, f_next = fn;
    for (int it = 0; it < iterations; ++it) {
      const double k1 = rhs(t, yn);
      const double k2 = rhs(t + 0.5 * step, yn + 0.5 * step * k1);
      const double k3 = rhs(t + 0.5 * step, yn + 0.5 * step * k2);
      const double k4 = rhs(t + step, yn + step * k3);
      y_next = yn + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      prov_y1 = y_next;
      f_next = rhs(t + step, y_next);
      prov_f1 = f_next;
    }
    sol.y_[n + 1] = y_next;
    sol.f_[n + 1] = f_next;
    prov_valid = false;
    if (sol.y_[n + 1] < 0.0)
      throw NumericError("dde solution went negative, reduce the step size");
  }
  return sol;
}

// ---------------------------------------------------------------------------
// characteristic function and dominant root

double characteristic_delta(double z, const DelayKernel& kernel) {
  return z - kernel.laplace(z);
}

std::complex<double> characteristic_delta(std::complex<double> z,
                                          const DelayKernel& kernel) {
  return z - kernel.laplace(z);
}

double dominant_root(const DelayKernel& kernel) {
  const double m = kernel.mass();
  double lo = 0.0, hi = m;
  // Delta(0) = -m < 0 and Delta(m) >= 0 since e^{theta m} <= 1 on theta <= 0.
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (characteristic_delta(mid, kernel) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  // Newton polish; Delta' = 1 - int theta e^{theta z} K >= 1 keeps it stable.
  double root = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double delta = characteristic_delta(root, kernel);
    if (std::abs(delta) <= 1e-13) break;
    const double dprime = 1.0 - kernel.laplace_theta(root);
    root -= delta / dprime;
  }
  return root;
}

double ratio_profile(const DenseSolution& sol, double t, double theta) {
  const double denom = sol.eval(t);
  if (!(std::abs(denom) > 1e-300))
    throw NumericError("ratio_profile: solution vanishes at t");
  return sol.eval(t + theta) / denom;
}

}  // namespace djp
