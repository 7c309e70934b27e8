// Command-line front end: scenario-driven simulation and verification with
// machine-readable JSON/CSV outputs.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "djp/asymptotics.hpp"
#include "djp/errors.hpp"
#include "djp/io.hpp"
#include "djp/lattice.hpp"
#include "djp/scenario.hpp"
#include "djp/simulator.hpp"
#include "djp/verify.hpp"

namespace {

using namespace djp;

constexpr int kExitPass = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonArgs {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<double> horizon;
  std::optional<std::string> probes;
  std::optional<int> workers;
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool with_overrides) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_path, "Output path")->required();
  if (with_overrides) {
    cmd->add_option("--seed", [&args](const std::vector<std::string>& v) {
      args.seed = std::stoull(v.back());
      return true;
    }, "Master seed override");
    cmd->add_option("--n", [&args](const std::vector<std::string>& v) {
      args.n = std::stoull(v.back());
      return true;
    }, "Ensemble size override");
    cmd->add_option("--horizon", [&args](const std::vector<std::string>& v) {
      args.horizon = std::stod(v.back());
      return true;
    }, "Horizon override");
    cmd->add_option("--probes", [&args](const std::vector<std::string>& v) {
      args.probes = v.back();
      return true;
    }, "Probe times override, comma separated");
    cmd->add_option("--workers", [&args](const std::vector<std::string>& v) {
      args.workers = std::stoi(v.back());
      return true;
    }, "Worker thread count override");
  }
}

Scenario load(const CommonArgs& args) {
  ScenarioOverrides ov;
  ov.seed = args.seed;
  ov.n = args.n;
  ov.horizon = args.horizon;
  ov.workers = args.workers;
  if (args.probes) {
    std::vector<double> probes;
    std::stringstream ss(*args.probes);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) probes.push_back(std::stod(item));
    }
    if (probes.empty()) throw ConfigError("--probes list is empty");
    ov.probes = probes;
  }
  return load_scenario(args.scenario_path, ov);
}

double policy_horizon(const Scenario& s) {
  double h = s.run.horizon;
  for (double p : s.run.probes) h = std::max(h, p);
  return h;
}

void write_header(JsonWriter& w, const Scenario& s) {
  w.key("tool");
  w.value(tool_version());
  w.key("scenario");
  w.value(s.name);
  w.key("scenario_hash");
  w.value(s.hash);
}

void write_matrix(JsonWriter& w, const Mat& m) {
  w.begin_array();
  for (int i = 0; i < m.rows; ++i) {
    w.begin_array();
    for (int j = 0; j < m.cols; ++j) w.value(m(i, j));
    w.end_array();
  }
  w.end_array();
}

// ---------------------------------------------------------------------------

int cmd_constants(const CommonArgs& args) {
  const Scenario s = load(args);
  const RatePolicy policy = s.make_policy(policy_horizon(s));
  const AsymptoticConstants c = compute_constants(s.measure, policy);

  JsonWriter w;
  w.begin_object();
  write_header(w, s);
  w.key("dimension");
  w.value(c.dimension);
  w.key("Gamma");
  w.value(c.delay_mass);
  w.key("lambda_inf");
  w.value(c.lambda_inf);
  w.key("K");
  w.number_array(c.drift);
  w.key("D0");
  write_matrix(w, c.diffusion);
  w.key("Sigma");
  write_matrix(w, c.covariance);
  w.key("spectral");
  w.begin_object();
  w.key("eigenvalues");
  w.number_array(c.spectral.eigenvalues);
  w.key("kernel_dim");
  w.value(c.spectral.kernel_dim);
  w.key("P");
  write_matrix(w, c.spectral.principal_axes);
  w.end_object();
  w.end_object();
  write_file_atomic(args.out_path, w.str() + "\n");
  return kExitPass;
}

int cmd_dde_gamma(const CommonArgs& args) {
  const Scenario s = load(args);
  if (!s.rate_is_hyperbolic())
    throw ConfigError("dde-gamma needs a hyperbolic_dde rate");
  const RatePolicy policy = s.make_policy(std::max(policy_horizon(s), 4.0));
  const double gamma = policy.dominant_root();
  const double delta = characteristic_delta(gamma, *policy.kernel());

  JsonWriter w;
  w.begin_object();
  write_header(w, s);
  w.key("a");
  w.value(policy.coefficient_a());
  w.key("b");
  w.value(policy.coefficient_b());
  w.key("kernel_mass");
  w.value(policy.kernel()->mass());
  w.key("gamma");
  w.value(gamma);
  w.key("delta_at_gamma");
  w.value(delta);
  w.end_object();
  write_file_atomic(args.out_path, w.str() + "\n");
  return kExitPass;
}

std::string csv_meta_line(const Scenario& s) {
  std::ostringstream line;
  line << "# scenario=" << s.hash << " seed=" << s.run.seed
       << " tool=" << tool_version() << " name=" << s.name << "\n";
  return line.str();
}

int cmd_simulate(const CommonArgs& args) {
  const Scenario s = load(args);
  const RatePolicy policy = s.make_policy(policy_horizon(s));
  const EnsembleResult ens =
      simulate_ensemble(s.measure, policy, s.initial, policy_horizon(s),
                        s.run.probes, s.run.n, s.run.seed, s.run.workers);

  std::ostringstream csv;
  csv << csv_meta_line(s);
  csv << "trajectory";
  for (double p : ens.probes)
    for (int d = 0; d < ens.dimension; ++d)
      csv << ",x" << (d + 1) << "_t" << format_number(p);
  csv << "\n";
  for (std::size_t i = 0; i < ens.trajectories; ++i) {
    csv << i;
    for (std::size_t p = 0; p < ens.probes.size(); ++p)
      for (int d = 0; d < ens.dimension; ++d)
        csv << "," << format_number(ens.at(i, p, d));
    csv << "\n";
  }
  write_file_atomic(args.out_path, csv.str());
  return kExitPass;
}

int cmd_lattice(const CommonArgs& args) {
  const Scenario s = load(args);
  const double t = s.run.probes.back();
  const RatePolicy policy = s.make_policy(std::max(t, 2.0));
  const LatticeEvolution evolution =
      solve_lattice(s.measure, policy, s.lattice_init(), s.dimension, t,
                    s.run.lattice_step);
  const LatticeLaw law = evolution.marginal_law(t);

  std::ostringstream csv;
  csv << csv_meta_line(s);
  csv << "i1";
  if (s.dimension == 2) csv << ",i2";
  csv << ",mass\n";
  for (std::size_t c = 0; c < law.mass.size(); ++c) {
    if (law.mass[c] == 0.0) continue;
    const auto off = law.window.offset_of(c);
    csv << off[0];
    if (s.dimension == 2) csv << "," << off[1];
    csv << "," << format_number(law.mass[c]) << "\n";
  }
  write_file_atomic(args.out_path, csv.str());
  return kExitPass;
}

void write_gof(JsonWriter& w, const GofReport& r) {
  w.begin_object();
  w.key("n");
  w.value(static_cast<std::uint64_t>(r.n));
  w.key("mean");
  w.number_array(r.mean);
  w.key("covariance");
  write_matrix(w, r.covariance);
  w.key("range_axes");
  w.begin_array();
  for (const auto& ax : r.range_axes) {
    w.begin_object();
    w.key("variance_expected");
    w.value(ax.variance_expected);
    w.key("mean");
    w.value(ax.mean);
    w.key("variance");
    w.value(ax.variance);
    w.key("skewness");
    w.value(ax.skewness);
    w.key("kurtosis_excess");
    w.value(ax.kurtosis_excess);
    w.key("ks");
    w.value(ax.ks);
    w.end_object();
  }
  w.end_array();
  w.key("kernel_max_abs");
  w.value(r.kernel_max_abs);
  w.key("mahalanobis_ks");
  w.value(r.mahalanobis_ks);
  w.key("covariance_singular");
  w.value(r.covariance_singular);
  w.key("tolerances");
  w.begin_object();
  w.key("ks");
  w.value(r.tolerances.ks);
  w.key("mean_abs");
  w.value(r.tolerances.mean_abs);
  w.key("var_abs");
  w.value(r.tolerances.var_abs);
  w.key("kernel_abs");
  w.value(r.tolerances.kernel_abs);
  w.end_object();
  w.key("ks_pass");
  w.value(r.ks_pass);
  w.key("mean_pass");
  w.value(r.mean_pass);
  w.key("var_pass");
  w.value(r.var_pass);
  w.key("kernel_pass");
  w.value(r.kernel_pass);
  w.key("pass");
  w.value(r.pass);
  w.end_object();
}

int cmd_verify_clt(const CommonArgs& args, const std::string& recentring_mode,
                   const std::string& dump_z_path) {
  const Scenario s = load(args);
  const double horizon = policy_horizon(s);
  const RatePolicy policy = s.make_policy(horizon);
  const AsymptoticConstants constants = compute_constants(s.measure, policy);
  const LimitLaw law = limit_law(constants);

  const EnsembleResult ens =
      simulate_ensemble(s.measure, policy, s.initial, horizon, s.run.probes,
                        s.run.n, s.run.seed, s.run.workers);

  GofTolerances tol;
  tol.ks = s.run.tolerances.ks;
  tol.mean_abs = s.run.tolerances.mean_abs;
  tol.var_abs = s.run.tolerances.var_abs;
  tol.kernel_abs = s.run.tolerances.kernel_abs;

  Recentring recentring = Recentring::DriftTimesT;
  std::optional<RecentringPath> path;
  if (recentring_mode == "path") {
    recentring = Recentring::Path;
    path.emplace(recentring_path(s.measure, policy, horizon,
                                 s.run.recentring_step > 0.0
                                     ? s.run.recentring_step
                                     : std::min(0.01, horizon / 1e4)));
  } else if (recentring_mode != "kt") {
    throw ConfigError("--recentring must be kt or path");
  }

  const SelfSimilarReport report = selfsimilar_profile(
      ens, constants, law, recentring, path ? &*path : nullptr, tol);

  JsonWriter w;
  w.begin_object();
  write_header(w, s);
  w.key("seed");
  w.value(ens.master_seed);
  w.key("n");
  w.value(static_cast<std::uint64_t>(ens.trajectories));
  w.key("recentring");
  w.value(recentring_mode);
  w.key("probes");
  w.begin_array();
  for (std::size_t p = 0; p < report.reports.size(); ++p) {
    w.begin_object();
    w.key("t");
    w.value(report.probe_times[p]);
    w.key("gof");
    write_gof(w, report.reports[p]);
    w.end_object();
  }
  w.end_array();
  w.key("ks_trend_pass");
  w.value(report.ks_trend_pass);
  const bool final_pass = report.reports.back().pass;
  w.key("pass");
  w.value(final_pass);
  w.end_object();
  write_file_atomic(args.out_path, w.str() + "\n");

  if (!dump_z_path.empty()) {
    std::ostringstream csv;
    csv << csv_meta_line(s);
    csv << "trajectory";
    for (double p : ens.probes)
      for (int d = 0; d < ens.dimension; ++d)
        csv << ",z" << (d + 1) << "_t" << format_number(p);
    csv << "\n";
    std::vector<Samples> z;
    for (std::size_t p = 0; p < ens.probes.size(); ++p) {
      const Samples x = samples_at_probe(ens, p);
      if (recentring == Recentring::DriftTimesT)
        z.push_back(rescale(x, ens.probes[p], constants.drift));
      else
        z.push_back(rescale_shifted(x, ens.probes[p], path->value(ens.probes[p])));
    }
    for (std::size_t i = 0; i < ens.trajectories; ++i) {
      csv << i;
      for (std::size_t p = 0; p < ens.probes.size(); ++p)
        for (int d = 0; d < ens.dimension; ++d)
          csv << "," << format_number(z[p].data[i * ens.dimension + d]);
      csv << "\n";
    }
    write_file_atomic(dump_z_path, csv.str());
  }
  return final_pass ? kExitPass : kExitVerificationFailed;
}

int cmd_verify_lln(const CommonArgs& args) {
  const Scenario s = load(args);
  const double horizon = policy_horizon(s);
  const RatePolicy policy = s.make_policy(horizon);
  const AsymptoticConstants constants = compute_constants(s.measure, policy);

  const EnsembleResult ens =
      simulate_ensemble(s.measure, policy, s.initial, horizon, s.run.probes,
                        s.run.n, s.run.seed, s.run.workers);

  LlnTolerance tol;
  tol.covariance_trace = 0.0;
  for (int d = 0; d < constants.dimension; ++d)
    tol.covariance_trace += constants.covariance(d, d);
  const LlnReport report = check_lln(ens, constants.drift, tol);

  JsonWriter w;
  w.begin_object();
  write_header(w, s);
  w.key("seed");
  w.value(ens.master_seed);
  w.key("n");
  w.value(static_cast<std::uint64_t>(ens.trajectories));
  w.key("K");
  w.number_array(constants.drift);
  w.key("probes");
  w.begin_array();
  for (const auto& p : report.probes) {
    w.begin_object();
    w.key("t");
    w.value(p.t);
    w.key("mean_ratio");
    w.number_array(p.mean_ratio);
    w.key("error");
    w.value(p.error);
    w.key("band");
    w.value(p.band);
    w.end_object();
  }
  w.end_array();
  w.key("final_pass");
  w.value(report.final_pass);
  w.key("monotone_pass");
  w.value(report.monotone_pass);
  w.key("pass");
  w.value(report.pass);
  w.end_object();
  write_file_atomic(args.out_path, w.str() + "\n");
  return report.pass ? kExitPass : kExitVerificationFailed;
}

int cmd_verify_lattice(const CommonArgs& args) {
  const Scenario s = load(args);
  const double t = s.run.probes.back();
  const RatePolicy policy = s.make_policy(std::max(policy_horizon(s), 2.0));

  const LatticeEvolution evolution =
      solve_lattice(s.measure, policy, s.lattice_init(), s.dimension, t,
                    s.run.lattice_step);
  const LatticeLaw law = evolution.marginal_law(t);

  const EnsembleResult ens =
      simulate_ensemble(s.measure, policy, s.initial, t, {t}, s.run.n,
                        s.run.seed, s.run.workers);
  const Samples x = samples_at_probe(ens, 0);
  const LatticeHistogram histogram = histogram_from_samples(x);
  const double tv = compare_lattice(histogram, law);
  const bool pass = tv <= s.run.tolerances.tv;

  JsonWriter w;
  w.begin_object();
  write_header(w, s);
  w.key("seed");
  w.value(ens.master_seed);
  w.key("n");
  w.value(static_cast<std::uint64_t>(ens.trajectories));
  w.key("t");
  w.value(t);
  w.key("tv");
  w.value(tv);
  w.key("tolerance_tv");
  w.value(s.run.tolerances.tv);
  w.key("lattice_renormalization");
  w.value(law.renormalization);
  w.key("pass");
  w.value(pass);
  w.end_object();
  write_file_atomic(args.out_path, w.str() + "\n");
  return pass ? kExitPass : kExitVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed jump process simulation and verification toolkit"};
  app.require_subcommand(1);

  CommonArgs constants_args, gamma_args, simulate_args, lattice_args,
      clt_args, lln_args, vlat_args;
  std::string recentring_mode = "kt";
  std::string dump_z_path;

  add_common_options(app.add_subcommand("constants",
                                        "Closed-form asymptotic constants"),
                     constants_args, false);
  add_common_options(
      app.add_subcommand("dde-gamma", "Dominant characteristic root"),
      gamma_args, false);
  add_common_options(app.add_subcommand("simulate", "Trajectory ensemble as CSV"),
                     simulate_args, true);
  add_common_options(
      app.add_subcommand("lattice", "Deterministic lattice law as CSV"),
      lattice_args, true);
  auto* clt = app.add_subcommand("verify-clt",
                                 "Rescaled ensemble against the limit law");
  add_common_options(clt, clt_args, true);
  clt->add_option("--recentring", recentring_mode,
                  "Recentring convention: kt or path");
  clt->add_option("--dump-z", dump_z_path, "Optional CSV of rescaled samples");
  add_common_options(
      app.add_subcommand("verify-lln", "Law of large numbers along probes"),
      lln_args, true);
  add_common_options(
      app.add_subcommand("verify-lattice",
                         "Monte Carlo histogram against the exact law"),
      vlat_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (app.got_subcommand("constants")) return cmd_constants(constants_args);
    if (app.got_subcommand("dde-gamma")) return cmd_dde_gamma(gamma_args);
    if (app.got_subcommand("simulate")) return cmd_simulate(simulate_args);
    if (app.got_subcommand("lattice")) return cmd_lattice(lattice_args);
    if (app.got_subcommand("verify-clt"))
      return cmd_verify_clt(clt_args, recentring_mode, dump_z_path);
    if (app.got_subcommand("verify-lln")) return cmd_verify_lln(lln_args);
    if (app.got_subcommand("verify-lattice")) return cmd_verify_lattice(vlat_args);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericError;
  }
  return kExitConfigError;
}
