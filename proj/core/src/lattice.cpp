#include "djp/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "djp/errors.hpp"

namespace djp {
namespace {

constexpr double kBoundaryMassThreshold = 1e-14;
constexpr double kMassLeakTolerance = 1e-8;
constexpr std::size_t kMaxStoredDoubles = 40'000'000;

double hermite(double s, double h, double y0, double f0, double y1, double f1) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
}

std::array<int, 2> to_int_offset(const Vec& z, int dim) {
  std::array<int, 2> out{0, 0};
  for (int d = 0; d < dim; ++d) {
    const double r = std::round(z[d]);
    if (std::abs(z[d] - r) > 1e-9)
      throw ConfigError("lattice oracle requires integer jump atoms");
    out[d] = static_cast<int>(r);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticeWindow / LatticeLaw

std::size_t LatticeWindow::size() const {
  std::size_t s = static_cast<std::size_t>(hi[0] - lo[0] + 1);
  if (dim == 2) s *= static_cast<std::size_t>(hi[1] - lo[1] + 1);
  return s;
}

std::size_t LatticeWindow::index(const std::array<int, 2>& offset) const {
  const std::size_t row = static_cast<std::size_t>(offset[0] - lo[0]);
  if (dim == 1) return row;
  return row * static_cast<std::size_t>(hi[1] - lo[1] + 1) +
         static_cast<std::size_t>(offset[1] - lo[1]);
}

bool LatticeWindow::contains(const std::array<int, 2>& offset) const {
  for (int d = 0; d < dim; ++d)
    if (offset[d] < lo[d] || offset[d] > hi[d]) return false;
  return true;
}

std::array<int, 2> LatticeWindow::offset_of(std::size_t index) const {
  if (dim == 1) return {lo[0] + static_cast<int>(index), 0};
  const std::size_t width = static_cast<std::size_t>(hi[1] - lo[1] + 1);
  return {lo[0] + static_cast<int>(index / width),
          lo[1] + static_cast<int>(index % width)};
}

double LatticeLaw::at(const std::array<int, 2>& offset) const {
  if (!window.contains(offset)) return 0.0;
  return mass[window.index(offset)];
}

Vec LatticeLaw::mean() const {
  Vec m(window.dim, 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const auto off = window.offset_of(i);
    for (int d = 0; d < window.dim; ++d) m[d] += mass[i] * off[d];
  }
  return m;
}

// ---------------------------------------------------------------------------
// LatticeEvolution

LatticeEvolution::LatticeEvolution(
    const StripMeasure& q, const RatePolicy& policy,
    const std::vector<std::pair<std::array<int, 2>, double>>& init,
    int dimension, double horizon, double step) {
  if (dimension < 1 || dimension > 2)
    throw ConfigError("lattice oracle supports dimension 1 or 2");
  if (!(horizon > 0.0)) throw ConfigError("lattice horizon must be positive");
  if (!(step > 0.0)) throw ConfigError("lattice step must be positive");
  const double per_unit = 1.0 / step;
  if (std::abs(per_unit - std::round(per_unit)) > 1e-9 * per_unit)
    throw ConfigError("lattice step must divide the unit delay interval");

  dim_ = dimension;
  step_ = step;
  policy_ = &policy;
  atoms_ = q.materialize_atoms();
  if (q.dimension() != dimension)
    throw ConfigError("lattice dimension does not match the measure");
  for (const auto& a : atoms_) {
    jumps_.push_back(to_int_offset(a.z, dim_));
    if (a.theta != 0.0) {
      const double ratio = -a.theta / step;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("lattice step must divide every delay atom");
    }
  }

  double init_mass = 0.0;
  for (const auto& [off, m] : init) {
    (void)off;
    init_mass += m;
  }
  if (std::abs(init_mass - 1.0) > 1e-12)
    throw ConfigError("lattice initial masses must sum to 1");
  init_ = init;

  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
  horizon_ = n_steps * step;

  // Window sized from a Poisson tail bound on the jump count, then grown on
  // demand whenever boundary mass appears.
  const double bar = policy.envelope(q, 0.0, std::max(horizon, 1.0));
  const double count_bound =
      bar * horizon_ + 6.0 * std::sqrt(std::max(bar * horizon_, 1.0));
  LatticeWindow window;
  window.dim = dim_;
  window.lo = init[0].first;
  window.hi = init[0].first;
  for (const auto& [off, m] : init) {
    (void)m;
    for (int d = 0; d < dim_; ++d) {
      window.lo[d] = std::min(window.lo[d], off[d]);
      window.hi[d] = std::max(window.hi[d], off[d]);
    }
  }
  for (int d = 0; d < dim_; ++d) {
    int jmin = 0, jmax = 0;
    for (const auto& j : jumps_) {
      jmin = std::min(jmin, j[d]);
      jmax = std::max(jmax, j[d]);
    }
    window.lo[d] += static_cast<int>(std::floor(count_bound * jmin)) - 1;
    window.hi[d] += static_cast<int>(std::ceil(count_bound * jmax)) + 1;
  }

  if ((n_steps + 1) * window.size() * 2 > kMaxStoredDoubles)
    throw ConfigError("lattice storage too large, increase the step size");

  steps_.reserve(n_steps + 1);
  Step first;
  first.window = window;
  first.u.assign(window.size(), 0.0);
  for (const auto& [off, m] : init) {
    if (!window.contains(off))
      throw ConfigError("lattice initial support outside window");
    first.u[window.index(off)] += m;
  }
  first.du.resize(window.size());
  rhs(0.0, window, first.u, 0, first.du);
  steps_.push_back(std::move(first));

  std::vector<double> k1, k2, k3, k4, stage, u_next;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = n * step_;
    const Step& cur = steps_.back();
    const LatticeWindow w = cur.window;
    const std::size_t m = w.size();

    k1 = cur.du;
    stage.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) stage[i] = cur.u[i] + 0.5 * step_ * k1[i];
    rhs(t + 0.5 * step_, w, stage, n, k2);
    for (std::size_t i = 0; i < m; ++i) stage[i] = cur.u[i] + 0.5 * step_ * k2[i];
    rhs(t + 0.5 * step_, w, stage, n, k3);
    for (std::size_t i = 0; i < m; ++i) stage[i] = cur.u[i] + step_ * k3[i];
    rhs(t + step_, w, stage, n, k4);

    u_next.assign(m, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      u_next[i] = cur.u[i] + (step_ / 6.0) *
                                 (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      total += u_next[i];
    }
    if (std::abs(total - 1.0) > kMassLeakTolerance)
      throw NumericError("lattice mass leak exceeds 1e-8, reduce the step size");

    Step next;
    next.window = w;
    next.u = u_next;

    // grow any side whose boundary shell carries visible mass
    bool grew = false;
    for (int d = 0; d < dim_; ++d) {
      double lo_mass = 0.0, hi_mass = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto off = w.offset_of(i);
        if (off[d] == w.lo[d]) lo_mass += std::abs(u_next[i]);
        if (off[d] == w.hi[d]) hi_mass += std::abs(u_next[i]);
      }
      int jspan = 1;
      for (const auto& j : jumps_) jspan = std::max(jspan, std::abs(j[d]));
      if (lo_mass > kBoundaryMassThreshold) {
        next.window.lo[d] -= 8 * jspan;
        grew = true;
      }
      if (hi_mass > kBoundaryMassThreshold) {
        next.window.hi[d] += 8 * jspan;
        grew = true;
      }
    }
    if (grew) {
      std::vector<double> embedded(next.window.size(), 0.0);
      for (std::size_t i = 0; i < m; ++i)
        embedded[next.window.index(w.offset_of(i))] = u_next[i];
      next.u = std::move(embedded);
      if ((n_steps + 1) * next.window.size() * 2 > kMaxStoredDoubles)
        throw ConfigError("lattice storage too large, increase the step size");
    }

    next.du.resize(next.window.size());
    rhs(t + step_, next.window, next.u, n + 1, next.du);
    steps_.push_back(std::move(next));
  }
}

double LatticeEvolution::history_mass(double t, std::size_t upto_step,
                                      const std::array<int, 2>& offset,
                                      const LatticeWindow& window) const {
  (void)window;
  if (t <= 0.0) {
    for (const auto& [off, m] : init_)
      if (off == offset) return m;
    return 0.0;
  }
  const double pos = t / step_;
  std::size_t i = static_cast<std::size_t>(pos + 1e-9);
  if (i > upto_step) i = upto_step;
  const double s = pos - static_cast<double>(i);
  const Step& a = steps_[i];
  const double ya = a.window.contains(offset) ? a.u[a.window.index(offset)] : 0.0;
  const double fa = a.window.contains(offset) ? a.du[a.window.index(offset)] : 0.0;
  if (s < 1e-9) return ya;
  const Step& b = steps_[i + 1];
  const double yb = b.window.contains(offset) ? b.u[b.window.index(offset)] : 0.0;
  const double fb = b.window.contains(offset) ? b.du[b.window.index(offset)] : 0.0;
  return hermite(s, step_, ya, fa, yb, fb);
}

void LatticeEvolution::rhs(double t, const LatticeWindow& window,
                           const std::vector<double>& u,
                           std::size_t upto_step,
                           std::vector<double>& out) const {
  const std::size_t m = window.size();
  out.assign(m, 0.0);

  double lambda = 0.0;
  for (const auto& a : atoms_)
    lambda += a.weight * policy_->evaluate(t, a.theta);
  for (std::size_t i = 0; i < m; ++i) out[i] = -lambda * u[i];

  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const auto& atom = atoms_[k];
    const double coeff = atom.weight * policy_->evaluate(t, atom.theta);
    const auto& jump = jumps_[k];
    if (atom.theta == 0.0) {
      for (std::size_t i = 0; i < m; ++i) {
        auto src = window.offset_of(i);
        for (int d = 0; d < dim_; ++d) src[d] -= jump[d];
        if (window.contains(src)) out[i] += coeff * u[window.index(src)];
      }
    } else {
      const double lag = t + atom.theta;
      for (std::size_t i = 0; i < m; ++i) {
        auto src = window.offset_of(i);
        for (int d = 0; d < dim_; ++d) src[d] -= jump[d];
        out[i] += coeff * history_mass(lag, upto_step, src, window);
      }
    }
  }
}

LatticeLaw LatticeEvolution::marginal_law(double t) const {
  if (t < 0.0 || t > horizon_ + 1e-9)
    throw ConfigError("lattice law queried outside [0, horizon]");
  const double pos = std::min(t, horizon_) / step_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= steps_.size() - 1) i = steps_.size() - 2;
  const double s = pos - static_cast<double>(i);

  const LatticeWindow& window = steps_[i + 1].window;  // superset of step i
  LatticeLaw law;
  law.time = t;
  law.window = window;
  law.mass.assign(window.size(), 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < window.size(); ++c) {
    const auto off = window.offset_of(c);
    const Step& a = steps_[i];
    const Step& b = steps_[i + 1];
    const double ya = a.window.contains(off) ? a.u[a.window.index(off)] : 0.0;
    const double fa = a.window.contains(off) ? a.du[a.window.index(off)] : 0.0;
    const double yb = b.u[c];
    const double fb = b.du[c];
    double v = s < 1e-9 ? ya : hermite(s, step_, ya, fa, yb, fb);
    if (v < 0.0) {
      if (v < -1e-12)
        throw NumericError("lattice law went negative beyond tolerance");
      v = 0.0;
    }
    law.mass[c] = v;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw NumericError("lattice law total mass deviates beyond 1e-10");
  law.renormalization = total;
  for (auto& v : law.mass) v /= total;
  return law;
}

double LatticeEvolution::mass_at(double t) const {
  if (t < 0.0 || t > horizon_ + 1e-9)
    throw ConfigError("lattice mass queried outside [0, horizon]");
  const double pos = std::min(t, horizon_) / step_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= steps_.size() - 1) i = steps_.size() - 2;
  const double s = pos - static_cast<double>(i);
  double total = 0.0;
  const Step& b = steps_[i + 1];
  for (std::size_t c = 0; c < b.window.size(); ++c) {
    const auto off = b.window.offset_of(c);
    const Step& a = steps_[i];
    const double ya = a.window.contains(off) ? a.u[a.window.index(off)] : 0.0;
    const double fa = a.window.contains(off) ? a.du[a.window.index(off)] : 0.0;
    total += s < 1e-9 ? ya : hermite(s, step_, ya, fa, b.u[c], b.du[c]);
  }
  return total;
}

LatticeEvolution solve_lattice(
    const StripMeasure& q, const RatePolicy& policy,
    const std::vector<std::pair<std::array<int, 2>, double>>& init,
    int dimension, double horizon, double step) {
  return LatticeEvolution(q, policy, init, dimension, horizon, step);
}

}  // namespace djp
