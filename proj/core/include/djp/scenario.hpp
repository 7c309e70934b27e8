#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "djp/rate_policy.hpp"
#include "djp/simulator.hpp"
#include "djp/strip_measure.hpp"

namespace djp {

struct ToleranceConfig {
  double ks = 0.08;
  double mean_abs = 0.02;
  double var_abs = 0.01;
  double kernel_abs = 0.0;
  double tv = 0.02;
};

struct RunParams {
  double horizon = 0.0;
  std::vector<double> probes;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  double dde_step = 1e-3;
  double lattice_step = 1e-3;
  double recentring_step = 0.0;  // 0 = automatic
  ToleranceConfig tolerances;
};

// Reconstructable description of the rate family; the policy itself is built
// per command because the hyperbolic variant caches its dense solution up to
// a horizon known only at run time.
struct RateSpec {
  RatePolicy::Kind kind = RatePolicy::Kind::ConstantOne;
  // separable
  std::string base_kind;  // "constant" | "exponential"
  double base_value = 1.0;
  double base_scale = 1.0;
  double base_rate = 0.0;
  double bound = 0.0;
  double beta = 1.0;
  double amplitude = 0.0;
  // hyperbolic
  double a = 0.0;
  double b = 0.0;
  std::optional<ThetaMeasure> eta;
  double history_value = 1.0;
};

struct Scenario {
  std::string name;
  int dimension = 1;
  StripMeasure measure;
  RateSpec rate;
  InitialCondition initial;
  RunParams run;
  std::string hash;       // stable digest of the canonical form
  std::string canonical;  // canonicalized JSON actually hashed

  RatePolicy make_policy(double horizon) const;
  bool rate_is_hyperbolic() const {
    return rate.kind == RatePolicy::Kind::HyperbolicDde;
  }

  // Initial mass vector for the lattice oracle; requires an atomic integer
  // initial law.
  std::vector<std::pair<std::array<int, 2>, double>> lattice_init() const;
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<double> horizon;
  std::optional<std::vector<double>> probes;
  std::optional<int> workers;
};

Scenario load_scenario(const std::string& path,
                       const ScenarioOverrides& overrides = {});
Scenario parse_scenario(const std::string& text,
                        const ScenarioOverrides& overrides = {});

std::string tool_version();

}  // namespace djp
