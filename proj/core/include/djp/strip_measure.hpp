#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "djp/linalg.hpp"
#include "djp/rng.hpp"

namespace djp {

// Probability measure on the delay interval [-1,0]: either a finite list of
// atoms or a density with quadrature-based integration and inverse-CDF
// sampling.
class ThetaMeasure {
 public:
  struct Atom {
    double weight;
    double theta;
  };

  static ThetaMeasure atoms(std::vector<Atom> atoms);
  static ThetaMeasure point(double theta) { return atoms({{1.0, theta}}); }
  static ThetaMeasure density(std::function<double(double)> pdf,
                              std::string label, int initial_nodes = 64);

  bool is_atomic() const { return density_ == nullptr; }
  const std::vector<Atom>& atom_list() const { return atoms_; }
  const std::function<double(double)>& density_fn() const { return density_; }
  const std::string& label() const { return label_; }

  // Integral of f against the measure: exact sum for atoms, adaptive
  // Gauss-Legendre for densities.
  double integrate(const std::function<double(double)>& f) const;

  double sample(Rng& rng) const;

  // An empty measure; invalid until assigned from a factory.
  ThetaMeasure() = default;

 private:
  std::vector<Atom> atoms_;
  std::function<double(double)> density_;
  std::string label_;
  int initial_nodes_ = 64;
  // inverse-CDF table for density sampling
  std::vector<double> cdf_;
  double cell_width_ = 0.0;
};

// Marginal law of the jump displacement z in R^N with closed-form first and
// second moments and an exact sampler.
class JumpMarginal {
 public:
  struct Atom {
    double weight;
    Vec z;
  };

  enum class Kind { Atomic, UniformBox, Gaussian };

  static JumpMarginal atoms(std::vector<Atom> atoms);
  static JumpMarginal point(Vec z);
  static JumpMarginal uniform_box(Vec lower, Vec upper);
  static JumpMarginal gaussian(Vec mean, Mat covariance);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  const Vec& mean() const { return mean_; }
  const Mat& second_moment() const { return second_moment_; }
  bool is_atomic() const { return kind_ == Kind::Atomic; }
  const std::vector<Atom>& atom_list() const { return atoms_; }

  void sample_into(Rng& rng, double* out) const;
  Vec sample(Rng& rng) const;

  JumpMarginal() = default;

 private:
  Kind kind_ = Kind::Atomic;
  int dim_ = 0;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  Vec lower_, upper_;
  Mat gaussian_factor_;  // F with F F^T = covariance
  Vec mean_;
  Mat second_moment_;
};

struct TiltStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

enum class TiltMethod { Auto, ForceRejection };

// Joint probability measure Q(d theta, dz) on the strip [-1,0] x R^N.
//
// Three concrete forms: a finite atom list; a product of a theta marginal and
// an independent jump marginal; and a theta marginal pushed through a
// deterministic coupling z(theta), which keeps measures concentrated on a
// curve exactly integrable.
class StripMeasure {
 public:
  struct Atom {
    double weight;
    double theta;
    Vec z;
  };

  enum class Form { Atomic, Product, ProductCoupled };

  static StripMeasure atomic(std::vector<Atom> atoms);
  static StripMeasure product(ThetaMeasure theta, JumpMarginal jump);
  // Q(d theta, dz) = eta(d theta) (x) delta_{g(theta)}(dz); `coupling` writes
  // the N components of g(theta).
  static StripMeasure product_coupled(ThetaMeasure theta,
                                      std::function<void(double, double*)> coupling,
                                      int dimension, std::string label);

  Form form() const { return form_; }
  int dimension() const { return dim_; }

  // Moments of f(theta) z^{(x)order} for order 0, 1, 2.
  double moment0(const std::function<double(double)>& f) const;
  Vec moment1(const std::function<double(double)>& f) const;
  Mat moment2(const std::function<double(double)>& f) const;

  void sample_into(Rng& rng, double& theta, double* z) const;
  std::pair<double, Vec> sample(Rng& rng) const;

  // Draw from w(theta) Q(d theta, dz) / int w dQ. Atomic theta support uses
  // exact categorical reweighting; otherwise acceptance-rejection against Q
  // with envelope w_sup. w must satisfy 0 < w(theta) <= w_sup on the support.
  void sample_tilted_into(const std::function<double(double)>& w, double w_sup,
                          Rng& rng, double& theta, double* z,
                          TiltStats* stats = nullptr,
                          TiltMethod method = TiltMethod::Auto) const;
  std::pair<double, Vec> sample_tilted(const std::function<double(double)>& w,
                                       double w_sup, Rng& rng,
                                       TiltStats* stats = nullptr,
                                       TiltMethod method = TiltMethod::Auto) const;

  bool theta_support_atomic() const;
  const std::vector<Atom>& atom_list() const { return atoms_; }
  const ThetaMeasure& theta_marginal() const { return theta_; }
  const JumpMarginal& jump_marginal() const { return jump_; }

  // Flattens product forms with atomic components into an explicit atom list.
  // Throws ConfigError when the measure has continuous parts.
  std::vector<Atom> materialize_atoms() const;

  StripMeasure() = default;

 private:
  void sample_theta_given(double theta, Rng& rng, double* z) const;

  Form form_ = Form::Atomic;
  int dim_ = 0;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  ThetaMeasure theta_;
  JumpMarginal jump_;
  std::function<void(double, double*)> coupling_;
  std::string coupling_label_;
};

}  // namespace djp
