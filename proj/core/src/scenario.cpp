#include "djp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "djp/errors.hpp"

namespace djp {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) ok = true;
    if (!ok)
      throw ConfigError("unknown field \"" + key + "\" in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("missing field \"" + std::string(key) + "\" in " + where);
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

Vec as_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw ConfigError(where + " must be a non-empty array of numbers");
  Vec out;
  for (const auto& x : v) out.push_back(as_number(x, where));
  return out;
}

ThetaMeasure parse_theta(const json& spec, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where + " must be an object");
  const std::string type = require(spec, "type", where).get<std::string>();
  if (type == "point") {
    check_keys(spec, {"type", "theta"}, where);
    return ThetaMeasure::point(as_number(require(spec, "theta", where), where + ".theta"));
  }
  if (type == "atomic") {
    check_keys(spec, {"type", "atoms"}, where);
    std::vector<ThetaMeasure::Atom> atoms;
    for (const auto& a : require(spec, "atoms", where)) {
      check_keys(a, {"weight", "theta"}, where + ".atoms[]");
      atoms.push_back({as_number(require(a, "weight", where), where),
                       as_number(require(a, "theta", where), where)});
    }
    return ThetaMeasure::atoms(std::move(atoms));
  }
  if (type == "uniform") {
    check_keys(spec, {"type"}, where);
    return ThetaMeasure::density([](double) { return 1.0; }, "uniform");
  }
  if (type == "exponential") {
    check_keys(spec, {"type", "rate"}, where);
    const double rate = as_number(require(spec, "rate", where), where + ".rate");
    if (rate == 0.0)
      return ThetaMeasure::density([](double) { return 1.0; }, "uniform");
    const double norm = rate / (1.0 - std::exp(-rate));
    return ThetaMeasure::density(
        [rate, norm](double t) { return norm * std::exp(rate * t); },
        "exponential(" + std::to_string(rate) + ")");
  }
  throw ConfigError("unknown theta measure type \"" + type + "\" in " + where);
}

JumpMarginal parse_jump(const json& spec, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where + " must be an object");
  const std::string type = require(spec, "type", where).get<std::string>();
  if (type == "point") {
    check_keys(spec, {"type", "z"}, where);
    return JumpMarginal::point(as_vector(require(spec, "z", where), where + ".z"));
  }
  if (type == "atomic") {
    check_keys(spec, {"type", "atoms"}, where);
    std::vector<JumpMarginal::Atom> atoms;
    for (const auto& a : require(spec, "atoms", where)) {
      check_keys(a, {"weight", "z"}, where + ".atoms[]");
      atoms.push_back({as_number(require(a, "weight", where), where),
                       as_vector(require(a, "z", where), where)});
    }
    return JumpMarginal::atoms(std::move(atoms));
  }
  if (type == "uniform_box") {
    check_keys(spec, {"type", "lower", "upper"}, where);
    return JumpMarginal::uniform_box(
        as_vector(require(spec, "lower", where), where + ".lower"),
        as_vector(require(spec, "upper", where), where + ".upper"));
  }
  if (type == "gaussian") {
    check_keys(spec, {"type", "mean", "cov"}, where);
    const Vec mean = as_vector(require(spec, "mean", where), where + ".mean");
    const auto& cov_spec = require(spec, "cov", where);
    const int dim = static_cast<int>(mean.size());
    Mat cov(dim, dim);
    if (!cov_spec.is_array() || static_cast<int>(cov_spec.size()) != dim)
      throw ConfigError(where + ".cov must be an NxN array");
    for (int i = 0; i < dim; ++i) {
      const Vec row = as_vector(cov_spec[i], where + ".cov[]");
      if (static_cast<int>(row.size()) != dim)
        throw ConfigError(where + ".cov must be an NxN array");
      for (int j = 0; j < dim; ++j) cov(i, j) = row[j];
    }
    return JumpMarginal::gaussian(mean, cov);
  }
  throw ConfigError("unknown jump marginal type \"" + type + "\" in " + where);
}

StripMeasure parse_measure(const json& spec, int dimension,
                           const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where + " must be an object");
  const std::string type = require(spec, "type", where).get<std::string>();
  if (type == "atomic") {
    check_keys(spec, {"type", "atoms"}, where);
    std::vector<StripMeasure::Atom> atoms;
    for (const auto& a : require(spec, "atoms", where)) {
      check_keys(a, {"weight", "theta", "z"}, where + ".atoms[]");
      atoms.push_back({as_number(require(a, "weight", where), where),
                       as_number(require(a, "theta", where), where),
                       as_vector(require(a, "z", where), where)});
    }
    auto q = StripMeasure::atomic(std::move(atoms));
    if (q.dimension() != dimension)
      throw ConfigError("measure dimension does not match scenario dimension");
    return q;
  }
  if (type == "product") {
    check_keys(spec, {"type", "theta", "jump", "coupling"}, where);
    ThetaMeasure theta = parse_theta(require(spec, "theta", where), where + ".theta");
    const bool has_coupling = spec.contains("coupling");
    const bool has_jump = spec.contains("jump");
    if (has_coupling == has_jump)
      throw ConfigError(where + " needs exactly one of \"jump\" or \"coupling\"");
    if (has_jump) {
      JumpMarginal jump = parse_jump(spec["jump"], where + ".jump");
      if (jump.dimension() != dimension)
        throw ConfigError("measure dimension does not match scenario dimension");
      return StripMeasure::product(std::move(theta), std::move(jump));
    }
    const json& cp = spec["coupling"];
    check_keys(cp, {"type", "slope"}, where + ".coupling");
    const std::string ctype = require(cp, "type", where).get<std::string>();
    if (ctype != "linear")
      throw ConfigError("unknown coupling type \"" + ctype + "\"");
    Vec slope;
    const json& s = require(cp, "slope", where + ".coupling");
    if (s.is_number())
      slope.assign(1, s.get<double>());
    else
      slope = as_vector(s, where + ".coupling.slope");
    if (static_cast<int>(slope.size()) != dimension)
      throw ConfigError("coupling slope dimension does not match scenario dimension");
    std::ostringstream label;
    label << "linear:";
    for (double v : slope) label << v << ",";
    return StripMeasure::product_coupled(
        std::move(theta),
        [slope](double th, double* out) {
          for (std::size_t i = 0; i < slope.size(); ++i) out[i] = slope[i] * th;
        },
        dimension, label.str());
  }
  throw ConfigError("unknown measure type \"" + type + "\" in " + where);
}

RateSpec parse_rate(const json& spec, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where + " must be an object");
  const std::string type = require(spec, "type", where).get<std::string>();
  RateSpec rate;
  if (type == "constant_one") {
    check_keys(spec, {"type"}, where);
    rate.kind = RatePolicy::Kind::ConstantOne;
    return rate;
  }
  if (type == "separable") {
    check_keys(spec, {"type", "base", "bound", "beta", "amplitude"}, where);
    rate.kind = RatePolicy::Kind::Separable;
    const json& base = require(spec, "base", where);
    const std::string btype = require(base, "type", where + ".base").get<std::string>();
    if (btype == "constant") {
      check_keys(base, {"type", "value"}, where + ".base");
      rate.base_kind = "constant";
      rate.base_value = as_number(require(base, "value", where), where);
    } else if (btype == "exponential") {
      check_keys(base, {"type", "scale", "rate"}, where + ".base");
      rate.base_kind = "exponential";
      rate.base_scale = as_number(require(base, "scale", where), where);
      rate.base_rate = as_number(require(base, "rate", where), where);
    } else {
      throw ConfigError("unknown separable base type \"" + btype + "\"");
    }
    rate.bound = as_number(require(spec, "bound", where), where + ".bound");
    rate.beta = as_number(require(spec, "beta", where), where + ".beta");
    rate.amplitude =
        spec.contains("amplitude") ? as_number(spec["amplitude"], where) : 0.0;
    return rate;
  }
  if (type == "hyperbolic_dde") {
    check_keys(spec, {"type", "a", "b", "eta", "history"}, where);
    rate.kind = RatePolicy::Kind::HyperbolicDde;
    rate.a = as_number(require(spec, "a", where), where + ".a");
    rate.b = as_number(require(spec, "b", where), where + ".b");
    rate.eta = parse_theta(require(spec, "eta", where), where + ".eta");
    const json& hist = require(spec, "history", where);
    check_keys(hist, {"type", "value"}, where + ".history");
    const std::string htype = require(hist, "type", where).get<std::string>();
    if (htype != "constant")
      throw ConfigError("unknown DDE history type \"" + htype + "\"");
    rate.history_value = as_number(require(hist, "value", where), where);
    if (!(rate.history_value > 0.0))
      throw ConfigError("DDE history value must be positive");
    return rate;
  }
  throw ConfigError("unknown rate type \"" + type + "\" in " + where);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

RatePolicy Scenario::make_policy(double horizon) const {
  switch (rate.kind) {
    case RatePolicy::Kind::ConstantOne:
      return RatePolicy::constant_one();
    case RatePolicy::Kind::Separable: {
      if (rate.base_kind == "constant") {
        const double v = rate.base_value;
        return RatePolicy::separable([v](double) { return v; }, "constant",
                                     rate.bound, rate.beta, rate.amplitude);
      }
      const double scale = rate.base_scale, r = rate.base_rate;
      return RatePolicy::separable(
          [scale, r](double th) { return scale * std::exp(r * th); },
          "exponential", rate.bound, rate.beta, rate.amplitude);
    }
    case RatePolicy::Kind::HyperbolicDde: {
      const double v = rate.history_value;
      return RatePolicy::hyperbolic_dde(rate.a, rate.b, *rate.eta,
                                        [v](double) { return v; }, horizon,
                                        run.dde_step);
    }
  }
  throw ConfigError("unreachable rate kind");
}

std::vector<std::pair<std::array<int, 2>, double>> Scenario::lattice_init()
    const {
  if (!initial.law.is_atomic())
    throw ConfigError("lattice oracle needs an atomic integer initial law");
  std::vector<std::pair<std::array<int, 2>, double>> init;
  for (const auto& a : initial.law.atom_list()) {
    std::array<int, 2> off{0, 0};
    for (int d = 0; d < dimension; ++d) {
      const double r = std::round(a.z[d]);
      if (std::abs(a.z[d] - r) > 1e-9)
        throw ConfigError("lattice oracle needs an atomic integer initial law");
      off[d] = static_cast<int>(r);
    }
    init.emplace_back(off, a.weight);
  }
  return init;
}

Scenario parse_scenario(const std::string& text,
                        const ScenarioOverrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario root must be an object");
  check_keys(root, {"name", "dimension", "measure", "rate", "initial", "run"},
             "scenario");

  // CLI overrides are folded in before hashing so the digest matches the run.
  json run = require(root, "run", "scenario");
  if (!run.is_object()) throw ConfigError("run block must be an object");
  if (overrides.seed) run["seed"] = *overrides.seed;
  if (overrides.n) run["n"] = *overrides.n;
  if (overrides.horizon) run["horizon"] = *overrides.horizon;
  if (overrides.probes) run["probes"] = *overrides.probes;
  if (overrides.workers) run["workers"] = *overrides.workers;
  root["run"] = run;

  Scenario s;
  s.name = require(root, "name", "scenario").get<std::string>();
  const json& dim_spec = require(root, "dimension", "scenario");
  if (!dim_spec.is_number_integer() || dim_spec.get<int>() < 1)
    throw ConfigError("dimension must be a positive integer");
  s.dimension = dim_spec.get<int>();

  s.measure = parse_measure(require(root, "measure", "scenario"), s.dimension,
                            "measure");
  s.rate = parse_rate(require(root, "rate", "scenario"), "rate");

  const json& init_spec = require(root, "initial", "scenario");
  check_keys(init_spec, {"law", "history"}, "initial");
  s.initial.law = parse_jump(require(init_spec, "law", "initial"), "initial.law");
  if (s.initial.law.dimension() != s.dimension)
    throw ConfigError("initial law dimension does not match scenario dimension");
  if (init_spec.contains("history")) {
    const std::string mode = init_spec["history"].get<std::string>();
    if (mode == "constant")
      s.initial.independent_per_theta = false;
    else if (mode == "independent")
      s.initial.independent_per_theta = true;
    else
      throw ConfigError("initial history must be \"constant\" or \"independent\"");
  }

  check_keys(run,
             {"horizon", "probes", "n", "seed", "workers", "dde_step",
              "lattice_step", "recentring_step", "tolerances"},
             "run");
  s.run.horizon = as_number(require(run, "horizon", "run"), "run.horizon");
  if (!(s.run.horizon > 0.0)) throw ConfigError("run.horizon must be positive");
  s.run.probes = as_vector(require(run, "probes", "run"), "run.probes");
  for (double p : s.run.probes)
    if (p < 0.0 || p > s.run.horizon)
      throw ConfigError("run.probes must lie in [0, horizon]");
  const json& n_spec = require(run, "n", "run");
  if (!n_spec.is_number_integer() || n_spec.get<long long>() < 1)
    throw ConfigError("run.n must be a positive integer");
  s.run.n = n_spec.get<std::size_t>();
  const json& seed_spec = require(run, "seed", "run");
  if (!seed_spec.is_number_integer())
    throw ConfigError("run.seed must be an integer");
  s.run.seed = seed_spec.get<std::uint64_t>();
  if (run.contains("workers")) {
    s.run.workers = run["workers"].get<int>();
    if (s.run.workers < 1) throw ConfigError("run.workers must be >= 1");
  }
  if (run.contains("dde_step"))
    s.run.dde_step = as_number(run["dde_step"], "run.dde_step");
  if (run.contains("lattice_step"))
    s.run.lattice_step = as_number(run["lattice_step"], "run.lattice_step");
  if (run.contains("recentring_step"))
    s.run.recentring_step = as_number(run["recentring_step"], "run.recentring_step");
  if (run.contains("tolerances")) {
    const json& tol = run["tolerances"];
    check_keys(tol, {"ks", "mean_abs", "var_abs", "kernel_abs", "tv"},
               "run.tolerances");
    auto& t = s.run.tolerances;
    if (tol.contains("ks")) t.ks = as_number(tol["ks"], "tolerances.ks");
    if (tol.contains("mean_abs")) t.mean_abs = as_number(tol["mean_abs"], "tolerances.mean_abs");
    if (tol.contains("var_abs")) t.var_abs = as_number(tol["var_abs"], "tolerances.var_abs");
    if (tol.contains("kernel_abs")) t.kernel_abs = as_number(tol["kernel_abs"], "tolerances.kernel_abs");
    if (tol.contains("tv")) t.tv = as_number(tol["tv"], "tolerances.tv");
  }

  // worker count is an execution detail: outputs must be byte-identical
  // across worker counts, so it stays out of the digest
  json canonical_root = root;
  canonical_root["run"].erase("workers");
  s.canonical = canonical_root.dump();  // objects iterate in sorted key order
  s.hash = hex64(fnv1a64(s.canonical));
  return s;
}

Scenario load_scenario(const std::string& path,
                       const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

std::string tool_version() { return "djp 0.1.0"; }

}  // namespace djp
