#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "djp/rate_policy.hpp"
#include "djp/rng.hpp"
#include "djp/strip_measure.hpp"

namespace djp {

// Law of the initial segment U(theta), theta in [-1,0]. By default a single
// value is drawn from `law` and held constant across theta; with
// independent_per_theta each distinct theta lookup draws its own value
// (memoized so repeated lookups agree). Both choices share the same marginal
// at every theta, which is all the evolution of the law depends on.
struct InitialCondition {
  JumpMarginal law;
  bool independent_per_theta = false;
};

class InitialHistory {
 public:
  InitialHistory(const InitialCondition& init, Rng& rng);

  const Vec& at(double theta) const;
  const Vec& at_zero() const { return at(0.0); }

 private:
  bool independent_ = false;
  Vec constant_value_;
  const JumpMarginal* law_ = nullptr;
  mutable std::map<double, Vec> memo_;
  mutable std::unique_ptr<Rng> history_rng_;
};

// One piecewise-constant cadlag path: value at t is the value set by the last
// jump at or before t, the initial segment before time zero.
class Trajectory {
 public:
  Trajectory(int dimension, double horizon, InitialHistory initial);

  int dimension() const { return dim_; }
  double horizon() const { return horizon_; }
  std::size_t jump_count() const { return times_.size(); }
  const std::vector<double>& jump_times() const { return times_; }

  void evaluate_into(double t, double* out) const;
  Vec evaluate(double t) const;

  // Left limit: value set strictly before t.
  void evaluate_left_into(double t, double* out) const;
  Vec evaluate_left(double t) const;

  void append_jump(double t, const double* value);

 private:
  int dim_;
  double horizon_;
  InitialHistory initial_;
  // parallel arrays, values flattened row-major
  std::vector<double> times_;
  std::vector<double> values_;
};

// Jump times from the driving nonhomogeneous Poisson process are produced by
// thinning against per-unit-window envelopes; each accepted time T draws its
// mark (Theta, Z) from alpha(T, .) Q / lambda(T) and displaces the value the
// path held at T + Theta (the left limit when Theta = 0).
Trajectory simulate(const StripMeasure& q, const RatePolicy& policy,
                    const InitialCondition& init, double horizon, Rng& rng);

// Same state machinery with externally supplied jump times.
Trajectory simulate_with_times(const StripMeasure& q, const RatePolicy& policy,
                               const InitialCondition& init, double horizon,
                               const std::vector<double>& jump_times, Rng& rng);

// Jump times for the hyperbolic rate by inverting the cumulative intensity
// log y(t) - log y(0) against unit exponentials; independent of the thinning
// code path, which makes it a cross-check oracle for the sampler.
std::vector<double> inversion_times_hyperbolic(const RatePolicy& policy,
                                               double horizon, Rng& rng);

// Terminal values of n independent trajectories at the probe times.
// Trajectory i consumes the substream derived from (master_seed, i), so the
// result is bitwise identical for any worker count.
struct EnsembleResult {
  int dimension = 0;
  std::vector<double> probes;
  std::size_t trajectories = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> values;  // [trajectory][probe][component]

  double at(std::size_t traj, std::size_t probe, int component) const {
    return values[(traj * probes.size() + probe) * dimension + component];
  }
};

EnsembleResult simulate_ensemble(const StripMeasure& q,
                                 const RatePolicy& policy,
                                 const InitialCondition& init, double horizon,
                                 const std::vector<double>& probes,
                                 std::size_t n, std::uint64_t master_seed,
                                 int workers = 1);

}  // namespace djp
