#include "djp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "djp/errors.hpp"

namespace djp {

// ---------------------------------------------------------------------------
// InitialHistory

InitialHistory::InitialHistory(const InitialCondition& init, Rng& rng)
    : independent_(init.independent_per_theta), law_(&init.law) {
  if (independent_) {
    // dedicated stream so memoized lookups do not disturb the caller's stream
    history_rng_ = std::make_unique<Rng>(rng.next_u64());
    memo_.emplace(0.0, law_->sample(*history_rng_));
  } else {
    constant_value_ = init.law.sample(rng);
  }
}

const Vec& InitialHistory::at(double theta) const {
  if (!independent_) return constant_value_;
  auto it = memo_.find(theta);
  if (it == memo_.end())
    it = memo_.emplace(theta, law_->sample(*history_rng_)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(int dimension, double horizon, InitialHistory initial)
    : dim_(dimension), horizon_(horizon), initial_(std::move(initial)) {}

void Trajectory::evaluate_into(double t, double* out) const {
  if (t < -1.0 - 1e-12 || t > horizon_ + 1e-12)
    throw ConfigError("trajectory evaluated outside [-1, horizon]");
  if (t < 0.0) {
    const Vec& u = initial_.at(std::max(t, -1.0));
    std::copy(u.begin(), u.end(), out);
    return;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) {
    const Vec& u = initial_.at_zero();
    std::copy(u.begin(), u.end(), out);
    return;
  }
  const std::size_t idx = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double* v = values_.data() + idx * dim_;
  std::copy(v, v + dim_, out);
}

Vec Trajectory::evaluate(double t) const {
  Vec out(dim_);
  evaluate_into(t, out.data());
  return out;
}

void Trajectory::evaluate_left_into(double t, double* out) const {
  if (t <= 0.0) {
    const Vec& u = initial_.at(std::max(t, -1.0));
    std::copy(u.begin(), u.end(), out);
    return;
  }
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) {
    const Vec& u = initial_.at_zero();
    std::copy(u.begin(), u.end(), out);
    return;
  }
  const std::size_t idx = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double* v = values_.data() + idx * dim_;
  std::copy(v, v + dim_, out);
}

Vec Trajectory::evaluate_left(double t) const {
  Vec out(dim_);
  evaluate_left_into(t, out.data());
  return out;
}

void Trajectory::append_jump(double t, const double* value) {
  if (!times_.empty() && !(t > times_.back()))
    throw NumericError("jump times must be strictly increasing");
  times_.push_back(t);
  values_.insert(values_.end(), value, value + dim_);
}

// ---------------------------------------------------------------------------
// simulation

namespace {

// Applies one jump at time t: draws (Theta, Z) from the tilted measure and
// displaces the value held at t + Theta.
void apply_jump(Trajectory& traj, const StripMeasure& q,
                const RatePolicy& policy, double t, Rng& rng, Vec& mark,
                Vec& state) {
  // categorical reweighting ignores the envelope, so only price it for the
  // rejection path
  const double w_sup = q.theta_support_atomic()
                           ? 1.0
                           : policy.sup_theta(t) * (1.0 + 1e-9);
  double theta = 0.0;
  q.sample_tilted_into([&](double th) { return policy.evaluate(t, th); }, w_sup,
                       rng, theta, mark.data());
  if (theta < -1.0 - 1e-12 || theta > 1e-12)
    throw NumericError("memory offset outside [-1,0]");
  if (theta == 0.0) {
    traj.evaluate_left_into(t, state.data());
  } else {
    traj.evaluate_into(t + theta, state.data());
  }
  for (int i = 0; i < traj.dimension(); ++i) state[i] += mark[i];
  traj.append_jump(t, state.data());
}

}  // namespace

Trajectory simulate(const StripMeasure& q, const RatePolicy& policy,
                    const InitialCondition& init, double horizon, Rng& rng) {
  if (!(horizon > 0.0)) throw ConfigError("simulation horizon must be positive");
  if (init.law.dimension() != q.dimension())
    throw ConfigError("initial law dimension does not match the measure");

  Trajectory traj(q.dimension(), horizon, InitialHistory(init, rng));
  Vec mark(q.dimension()), state(q.dimension());

  const bool constant_rate = policy.kind() == RatePolicy::Kind::ConstantOne;
  double window = 0.0;
  while (window < horizon) {
    const double window_end = std::min(window + 1.0, horizon);
    const double bar = policy.envelope(q, window, window_end);
    double t = window;
    for (;;) {
      t += rng.exponential() / bar;
      if (t >= window_end) break;
      const double lam = constant_rate ? 1.0 : policy.lambda_t(q, t);
      if (lam > bar * (1.0 + 1e-9))
        throw NumericError("thinning envelope violated");
      const bool accept = constant_rate || rng.uniform() * bar < lam;
      if (accept) apply_jump(traj, q, policy, t, rng, mark, state);
    }
    window = window_end;
  }
  return traj;
}

Trajectory simulate_with_times(const StripMeasure& q, const RatePolicy& policy,
                               const InitialCondition& init, double horizon,
                               const std::vector<double>& jump_times,
                               Rng& rng) {
  if (!(horizon > 0.0)) throw ConfigError("simulation horizon must be positive");
  Trajectory traj(q.dimension(), horizon, InitialHistory(init, rng));
  Vec mark(q.dimension()), state(q.dimension());
  for (double t : jump_times) {
    if (t > horizon) break;
    apply_jump(traj, q, policy, t, rng, mark, state);
  }
  return traj;
}

std::vector<double> inversion_times_hyperbolic(const RatePolicy& policy,
                                               double horizon, Rng& rng) {
  const DenseSolution* y = policy.dde_solution();
  if (y == nullptr)
    throw ConfigError("inversion sampler requires the hyperbolic rate");
  if (horizon > y->horizon())
    throw ConfigError("horizon exceeds the cached dense solution");

  std::vector<double> times;
  double t = 0.0;
  double level = y->eval(0.0);
  for (;;) {
    // y(T_next) = y(T) e^E with E ~ Exp(1); y is nondecreasing.
    level *= std::exp(rng.exponential());
    if (level > y->eval(horizon)) break;
    double lo = t, hi = horizon;
    for (int i = 0; i < 64; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (y->eval(mid) < level)
        lo = mid;
      else
        hi = mid;
    }
    t = 0.5 * (lo + hi);
    if (t >= horizon) break;
    times.push_back(t);
  }
  return times;
}

EnsembleResult simulate_ensemble(const StripMeasure& q,
                                 const RatePolicy& policy,
                                 const InitialCondition& init, double horizon,
                                 const std::vector<double>& probes,
                                 std::size_t n, std::uint64_t master_seed,
                                 int workers) {
  if (n < 1) throw ConfigError("ensemble needs at least one trajectory");
  if (probes.empty()) throw ConfigError("ensemble needs at least one probe time");
  for (double p : probes)
    if (p < 0.0 || p > horizon)
      throw ConfigError("probe time outside [0, horizon]");

  EnsembleResult result;
  result.dimension = q.dimension();
  result.probes = probes;
  result.trajectories = n;
  result.master_seed = master_seed;
  result.values.resize(n * probes.size() * q.dimension());

  auto run_one = [&](std::size_t i) {
    Rng rng = Rng::substream(master_seed, i);
    const Trajectory traj = simulate(q, policy, init, horizon, rng);
    double* row = result.values.data() + i * probes.size() * q.dimension();
    for (std::size_t p = 0; p < probes.size(); ++p)
      traj.evaluate_into(probes[p], row + p * q.dimension());
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
    return result;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          run_one(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mu);
          failed.store(true);
          if (error_message.empty()) error_message = e.what();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) throw NumericError("ensemble worker failed: " + error_message);
  return result;
}

}  // namespace djp
