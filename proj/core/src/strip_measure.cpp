#include "djp/strip_measure.hpp"

#include <algorithm>
#include <cmath>

#include "djp/errors.hpp"
#include "djp/quadrature.hpp"

namespace djp {
namespace {

constexpr double kWeightFloor = 1e-15;
constexpr double kMassTol = 1e-12;
constexpr int kCdfCells = 4096;

void check_theta_range(double theta) {
  if (!(theta >= -1.0 && theta <= 0.0))
    throw ConfigError("theta offset outside [-1,0]");
}

std::size_t pick_category(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  if (i >= cumulative.size()) i = cumulative.size() - 1;
  return i;
}

std::vector<double> build_cumulative(const std::vector<double>& weights) {
  std::vector<double> c(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    c[i] = acc;
  }
  c.back() = 1.0;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// ThetaMeasure

ThetaMeasure ThetaMeasure::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ConfigError("theta measure needs at least one atom");
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (a.weight < kWeightFloor)
      throw ConfigError("theta atom weight below 1e-15");
    check_theta_range(a.theta);
    mass += a.weight;
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw ConfigError("theta atom weights must sum to 1");
  ThetaMeasure m;
  m.atoms_ = std::move(atoms);
  return m;
}

ThetaMeasure ThetaMeasure::density(std::function<double(double)> pdf,
                                   std::string label, int initial_nodes) {
  ThetaMeasure m;
  m.density_ = std::move(pdf);
  m.label_ = std::move(label);
  m.initial_nodes_ = initial_nodes;
  const double mass = integrate_adaptive(m.density_, initial_nodes);
  if (std::abs(mass - 1.0) > 1e-8)
    throw ConfigError("theta density mass is " + std::to_string(mass) +
                      ", expected 1");
  // cumulative table for inverse-CDF sampling, Simpson per cell
  m.cdf_.resize(kCdfCells + 1);
  m.cell_width_ = 1.0 / kCdfCells;
  m.cdf_[0] = 0.0;
  for (int i = 0; i < kCdfCells; ++i) {
    const double a = -1.0 + i * m.cell_width_;
    const double b = a + m.cell_width_;
    const double cell = (m.cell_width_ / 6.0) *
                        (m.density_(a) + 4.0 * m.density_(0.5 * (a + b)) +
                         m.density_(b));
    m.cdf_[i + 1] = m.cdf_[i] + std::max(cell, 0.0);
  }
  const double total = m.cdf_.back();
  if (total <= 0.0) throw ConfigError("theta density is not positive");
  for (auto& c : m.cdf_) c /= total;
  return m;
}

double ThetaMeasure::integrate(const std::function<double(double)>& f) const {
  if (is_atomic()) {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.weight * f(a.theta);
    return acc;
  }
  const auto& pdf = density_;
  return integrate_adaptive([&](double t) { return f(t) * pdf(t); },
                            initial_nodes_);
}

double ThetaMeasure::sample(Rng& rng) const {
  if (is_atomic()) {
    if (atoms_.size() == 1) return atoms_[0].theta;
    double u = rng.uniform();
    for (const auto& a : atoms_) {
      if (u < a.weight) return a.theta;
      u -= a.weight;
    }
    return atoms_.back().theta;
  }
  const double u = rng.uniform();
  std::size_t idx = pick_category(cdf_, u);
  std::size_t cell = (idx == 0) ? 0 : idx - 1;
  if (cell >= static_cast<std::size_t>(kCdfCells)) cell = kCdfCells - 1;
  const double lo = cdf_[cell], hi = cdf_[cell + 1];
  const double frac = (hi > lo) ? (u - lo) / (hi - lo) : 0.5;
  return -1.0 + (cell + frac) * cell_width_;
}

// ---------------------------------------------------------------------------
// JumpMarginal

JumpMarginal JumpMarginal::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ConfigError("jump marginal needs at least one atom");
  const int dim = static_cast<int>(atoms[0].z.size());
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (a.weight < kWeightFloor) throw ConfigError("jump atom weight below 1e-15");
    if (static_cast<int>(a.z.size()) != dim)
      throw ConfigError("jump atoms have inconsistent dimensions");
    mass += a.weight;
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw ConfigError("jump atom weights must sum to 1");

  JumpMarginal m;
  m.kind_ = Kind::Atomic;
  m.dim_ = dim;
  m.atoms_ = std::move(atoms);
  std::vector<double> weights;
  weights.reserve(m.atoms_.size());
  for (const auto& a : m.atoms_) weights.push_back(a.weight);
  m.cumulative_ = build_cumulative(weights);
  m.mean_.assign(dim, 0.0);
  m.second_moment_ = Mat(dim, dim);
  for (const auto& a : m.atoms_) {
    for (int i = 0; i < dim; ++i) {
      m.mean_[i] += a.weight * a.z[i];
      for (int j = 0; j < dim; ++j)
        m.second_moment_(i, j) += a.weight * a.z[i] * a.z[j];
    }
  }
  return m;
}

JumpMarginal JumpMarginal::point(Vec z) { return atoms({{1.0, std::move(z)}}); }

JumpMarginal JumpMarginal::uniform_box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.empty())
    throw ConfigError("uniform box bounds mismatch");
  const int dim = static_cast<int>(lower.size());
  for (int i = 0; i < dim; ++i)
    if (!(lower[i] <= upper[i])) throw ConfigError("uniform box lower > upper");

  JumpMarginal m;
  m.kind_ = Kind::UniformBox;
  m.dim_ = dim;
  m.lower_ = std::move(lower);
  m.upper_ = std::move(upper);
  m.mean_.resize(dim);
  m.second_moment_ = Mat(dim, dim);
  for (int i = 0; i < dim; ++i) {
    m.mean_[i] = 0.5 * (m.lower_[i] + m.upper_[i]);
    const double w = m.upper_[i] - m.lower_[i];
    m.second_moment_(i, i) = w * w / 12.0 + m.mean_[i] * m.mean_[i];
    for (int j = 0; j < dim; ++j)
      if (j != i) m.second_moment_(i, j) = m.mean_[i] * m.mean_[j];
  }
  return m;
}

JumpMarginal JumpMarginal::gaussian(Vec mean, Mat covariance) {
  const int dim = static_cast<int>(mean.size());
  if (covariance.rows != dim || covariance.cols != dim)
    throw ConfigError("gaussian covariance shape mismatch");
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (std::abs(covariance(i, j) - covariance(j, i)) > 1e-12)
        throw ConfigError("gaussian covariance must be symmetric");
  const SymmetricEigen eig = symmetric_eigen(covariance);
  for (double lam : eig.values)
    if (lam < -1e-12) throw ConfigError("gaussian covariance not PSD");

  JumpMarginal m;
  m.kind_ = Kind::Gaussian;
  m.dim_ = dim;
  m.mean_ = std::move(mean);
  m.gaussian_factor_ = psd_factor(covariance);
  m.second_moment_ = covariance;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      m.second_moment_(i, j) += m.mean_[i] * m.mean_[j];
  return m;
}

void JumpMarginal::sample_into(Rng& rng, double* out) const {
  switch (kind_) {
    case Kind::Atomic: {
      const std::size_t i =
          atoms_.size() == 1 ? 0 : pick_category(cumulative_, rng.uniform());
      std::copy(atoms_[i].z.begin(), atoms_[i].z.end(), out);
      return;
    }
    case Kind::UniformBox:
      for (int i = 0; i < dim_; ++i)
        out[i] = lower_[i] + (upper_[i] - lower_[i]) * rng.uniform();
      return;
    case Kind::Gaussian: {
      Vec g(dim_);
      for (int i = 0; i < dim_; ++i) g[i] = rng.normal();
      for (int i = 0; i < dim_; ++i) {
        double acc = mean_[i];
        for (int j = 0; j < dim_; ++j) acc += gaussian_factor_(i, j) * g[j];
        out[i] = acc;
      }
      return;
    }
  }
}

Vec JumpMarginal::sample(Rng& rng) const {
  Vec z(dim_);
  sample_into(rng, z.data());
  return z;
}

// ---------------------------------------------------------------------------
// StripMeasure

StripMeasure StripMeasure::atomic(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ConfigError("strip measure needs at least one atom");
  const int dim = static_cast<int>(atoms[0].z.size());
  if (dim < 1) throw ConfigError("strip measure dimension must be positive");
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (a.weight < kWeightFloor)
      throw ConfigError("strip atom weight below 1e-15");
    check_theta_range(a.theta);
    if (static_cast<int>(a.z.size()) != dim)
      throw ConfigError("strip atoms have inconsistent dimensions");
    mass += a.weight;
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw ConfigError("strip atom weights must sum to 1");

  StripMeasure q;
  q.form_ = Form::Atomic;
  q.dim_ = dim;
  q.atoms_ = std::move(atoms);
  std::vector<double> weights;
  weights.reserve(q.atoms_.size());
  for (const auto& a : q.atoms_) weights.push_back(a.weight);
  q.cumulative_ = build_cumulative(weights);
  return q;
}

StripMeasure StripMeasure::product(ThetaMeasure theta, JumpMarginal jump) {
  StripMeasure q;
  q.form_ = Form::Product;
  q.dim_ = jump.dimension();
  q.theta_ = std::move(theta);
  q.jump_ = std::move(jump);
  return q;
}

StripMeasure StripMeasure::product_coupled(
    ThetaMeasure theta, std::function<void(double, double*)> coupling,
    int dimension, std::string label) {
  if (dimension < 1) throw ConfigError("strip measure dimension must be positive");
  StripMeasure q;
  q.form_ = Form::ProductCoupled;
  q.dim_ = dimension;
  q.theta_ = std::move(theta);
  q.coupling_ = std::move(coupling);
  q.coupling_label_ = std::move(label);
  return q;
}

double StripMeasure::moment0(const std::function<double(double)>& f) const {
  if (form_ == Form::Atomic) {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.weight * f(a.theta);
    return acc;
  }
  return theta_.integrate(f);
}

Vec StripMeasure::moment1(const std::function<double(double)>& f) const {
  Vec out(dim_, 0.0);
  switch (form_) {
    case Form::Atomic:
      for (const auto& a : atoms_) {
        const double w = a.weight * f(a.theta);
        for (int i = 0; i < dim_; ++i) out[i] += w * a.z[i];
      }
      return out;
    case Form::Product: {
      const double s = theta_.integrate(f);
      for (int i = 0; i < dim_; ++i) out[i] = s * jump_.mean()[i];
      return out;
    }
    case Form::ProductCoupled: {
      Vec buf(dim_);
      for (int i = 0; i < dim_; ++i) {
        out[i] = theta_.integrate([&](double t) {
          coupling_(t, buf.data());
          return f(t) * buf[i];
        });
      }
      return out;
    }
  }
  return out;
}

Mat StripMeasure::moment2(const std::function<double(double)>& f) const {
  Mat out(dim_, dim_);
  switch (form_) {
    case Form::Atomic:
      for (const auto& a : atoms_) {
        const double w = a.weight * f(a.theta);
        for (int i = 0; i < dim_; ++i)
          for (int j = 0; j < dim_; ++j) out(i, j) += w * a.z[i] * a.z[j];
      }
      return out;
    case Form::Product: {
      const double s = theta_.integrate(f);
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          out(i, j) = s * jump_.second_moment()(i, j);
      return out;
    }
    case Form::ProductCoupled: {
      Vec buf(dim_);
      for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
          out(i, j) = theta_.integrate([&](double t) {
            coupling_(t, buf.data());
            return f(t) * buf[i] * buf[j];
          });
          out(j, i) = out(i, j);
        }
      return out;
    }
  }
  return out;
}

void StripMeasure::sample_theta_given(double theta, Rng& rng, double* z) const {
  switch (form_) {
    case Form::Atomic:
      // unreachable: atomic sampling picks (theta, z) jointly
      throw NumericError("internal: conditional sampling on atomic form");
    case Form::Product:
      jump_.sample_into(rng, z);
      return;
    case Form::ProductCoupled:
      coupling_(theta, z);
      return;
  }
}

void StripMeasure::sample_into(Rng& rng, double& theta, double* z) const {
  if (form_ == Form::Atomic) {
    const std::size_t i =
        atoms_.size() == 1 ? 0 : pick_category(cumulative_, rng.uniform());
    theta = atoms_[i].theta;
    std::copy(atoms_[i].z.begin(), atoms_[i].z.end(), z);
    return;
  }
  theta = theta_.sample(rng);
  sample_theta_given(theta, rng, z);
}

std::pair<double, Vec> StripMeasure::sample(Rng& rng) const {
  Vec z(dim_);
  double theta = 0.0;
  sample_into(rng, theta, z.data());
  return {theta, std::move(z)};
}

void StripMeasure::sample_tilted_into(const std::function<double(double)>& w,
                                      double w_sup, Rng& rng, double& theta,
                                      double* z, TiltStats* stats,
                                      TiltMethod method) const {
  const bool categorical =
      method == TiltMethod::Auto && theta_support_atomic();

  if (categorical) {
    if (form_ == Form::Atomic) {
      double total = 0.0;
      for (const auto& a : atoms_) total += a.weight * w(a.theta);
      if (!(total > 0.0)) throw NumericError("tilt weight vanishes on support");
      double u = rng.uniform() * total;
      std::size_t pick = atoms_.size() - 1;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const double mass = atoms_[i].weight * w(atoms_[i].theta);
        if (u < mass) {
          pick = i;
          break;
        }
        u -= mass;
      }
      theta = atoms_[pick].theta;
      std::copy(atoms_[pick].z.begin(), atoms_[pick].z.end(), z);
    } else {
      const auto& th = theta_.atom_list();
      double total = 0.0;
      for (const auto& a : th) total += a.weight * w(a.theta);
      if (!(total > 0.0)) throw NumericError("tilt weight vanishes on support");
      double u = rng.uniform() * total;
      std::size_t pick = th.size() - 1;
      for (std::size_t i = 0; i < th.size(); ++i) {
        const double mass = th[i].weight * w(th[i].theta);
        if (u < mass) {
          pick = i;
          break;
        }
        u -= mass;
      }
      theta = th[pick].theta;
      sample_theta_given(theta, rng, z);
    }
    if (stats) {
      ++stats->proposals;
      ++stats->accepted;
    }
    return;
  }

  // acceptance-rejection against Q with envelope w_sup
  if (!(w_sup > 0.0)) throw NumericError("tilt envelope must be positive");
  for (;;) {
    sample_into(rng, theta, z);
    const double wt = w(theta);
    if (stats) ++stats->proposals;
    if (wt > w_sup * (1.0 + 1e-12))
      throw NumericError("tilt envelope violated: w(theta) exceeds w_sup");
    if (rng.uniform() * w_sup < wt) {
      if (stats) ++stats->accepted;
      return;
    }
  }
}

std::pair<double, Vec> StripMeasure::sample_tilted(
    const std::function<double(double)>& w, double w_sup, Rng& rng,
    TiltStats* stats, TiltMethod method) const {
  Vec z(dim_);
  double theta = 0.0;
  sample_tilted_into(w, w_sup, rng, theta, z.data(), stats, method);
  return {theta, std::move(z)};
}

bool StripMeasure::theta_support_atomic() const {
  if (form_ == Form::Atomic) return true;
  return theta_.is_atomic();
}

std::vector<StripMeasure::Atom> StripMeasure::materialize_atoms() const {
  switch (form_) {
    case Form::Atomic:
      return atoms_;
    case Form::Product: {
      if (!theta_.is_atomic() || !jump_.is_atomic())
        throw ConfigError("measure has continuous parts, no atom list");
      std::vector<Atom> out;
      for (const auto& t : theta_.atom_list())
        for (const auto& j : jump_.atom_list())
          out.push_back({t.weight * j.weight, t.theta, j.z});
      return out;
    }
    case Form::ProductCoupled: {
      if (!theta_.is_atomic())
        throw ConfigError("measure has continuous parts, no atom list");
      std::vector<Atom> out;
      Vec buf(dim_);
      for (const auto& t : theta_.atom_list()) {
        coupling_(t.theta, buf.data());
        out.push_back({t.weight, t.theta, buf});
      }
      return out;
    }
  }
  return {};
}

}  // namespace djp
