#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "djp/rate_policy.hpp"
#include "djp/strip_measure.hpp"

namespace djp {

// Integer box window in one or two dimensions with row-major cell indexing.
struct LatticeWindow {
  int dim = 1;
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{0, 0};  // inclusive

  std::size_t size() const;
  std::size_t index(const std::array<int, 2>& offset) const;
  bool contains(const std::array<int, 2>& offset) const;
  std::array<int, 2> offset_of(std::size_t index) const;
};

// Probability vector over integer offsets at a fixed time.
struct LatticeLaw {
  double time = 0.0;
  LatticeWindow window;
  std::vector<double> mass;
  double renormalization = 1.0;  // factor applied to reach total mass one

  double at(const std::array<int, 2>& offset) const;
  Vec mean() const;
  double total_before_renormalization() const { return renormalization; }
};

// Deterministic exact-law oracle for atomic integer-jump scenarios: the
// probability vector u_i(t) solves
//   du_i/dt = sum_k w_k alpha(t, theta_k) u_{i-j_k}(t + theta_k) - lambda(t) u_i(t)
// by fixed-step RK4 with Hermite-interpolable dense history. Delay atoms must
// be multiples of the step; an atom at theta = 0 couples through the stage
// values.
class LatticeEvolution {
 public:
  LatticeEvolution(const StripMeasure& q, const RatePolicy& policy,
                   const std::vector<std::pair<std::array<int, 2>, double>>& init,
                   int dimension, double horizon, double step);

  double horizon() const { return horizon_; }
  double step() const { return step_; }
  int dimension() const { return dim_; }

  LatticeLaw marginal_law(double t) const;
  double mass_at(double t) const;  // unnormalized total, for conservation checks

 private:
  struct Step {
    LatticeWindow window;
    std::vector<double> u;
    std::vector<double> du;
  };

  void rhs(double t, const LatticeWindow& window, const std::vector<double>& u,
           std::size_t upto_step, std::vector<double>& out) const;
  double history_mass(double t, std::size_t upto_step,
                      const std::array<int, 2>& offset,
                      const LatticeWindow& window) const;

  int dim_ = 1;
  double horizon_ = 0.0;
  double step_ = 0.0;
  const RatePolicy* policy_ = nullptr;
  std::vector<StripMeasure::Atom> atoms_;
  std::vector<std::array<int, 2>> jumps_;
  std::vector<Step> steps_;
  std::vector<std::pair<std::array<int, 2>, double>> init_;
};

LatticeEvolution solve_lattice(
    const StripMeasure& q, const RatePolicy& policy,
    const std::vector<std::pair<std::array<int, 2>, double>>& init,
    int dimension, double horizon, double step = 1e-3);

}  // namespace djp
