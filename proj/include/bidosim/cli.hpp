#pragma once

// Command orchestration behind the executable: resolve the configuration,
// create a run directory, bracket the run with a manifest, execute the
// command, and map its outcome to the exit-code contract
//   0 success / within_bound, 2 violated_beyond_CI, 3 inconclusive, 1 error.
// The JSON report goes to stdout; diagnostics go to stderr only.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "bidosim/config.hpp"
#include "bidosim/report_io.hpp"

namespace bidosim {

struct CliOptions {
  std::string command;          // operator-info | check-model | simulate | experiment
  std::string experiment_kind;  // small-noise | tail | stationary | support
  std::string config_path;      // empty: defaults only
  std::string out_root;         // empty: $BIDOSIM_OUT_DIR, then "runs"
  bool with_noise = false;      // operator-info --noise
  std::optional<std::uint64_t> seed_override;
  std::optional<int> replicas_override;
  std::optional<int> threads_override;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

inline std::string resolve_out_root(const std::string& explicit_root) {
  if (!explicit_root.empty()) return explicit_root;
  if (const char* env = std::getenv("BIDOSIM_OUT_DIR"); env && *env) return env;
  return "runs";
}

// <root>/<timestamp>-seed<seed>-<command>, suffixed -1, -2, ... on collision.
inline std::filesystem::path create_run_dir(const std::string& root, std::uint64_t seed,
                                            const std::string& command) {
  const std::string base =
      timestamp_token() + "-seed" + std::to_string(seed) + "-" + command;
  std::filesystem::create_directories(root);
  std::filesystem::path dir = std::filesystem::path(root) / base;
  int suffix = 0;
  while (!std::filesystem::create_directory(dir)) {
    ++suffix;
    dir = std::filesystem::path(root) / (base + "-" + std::to_string(suffix));
  }
  return dir;
}

inline int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::within_bound: return 0;
    case Verdict::violated_beyond_CI: return 2;
    default: return 3;
  }
}

namespace detail {

inline nlohmann::json operator_info_json(const ResolvedConfig& cfg, const BidomainOperator& op,
                                         const NoiseSpectrum& spectrum, bool with_noise) {
  nlohmann::json j;
  j["name"] = "operator_info";
  j["grid"] = {{"dimension", cfg.grid.dimension},
               {"nodes", cfg.grid.nodes},
               {"extent", cfg.grid.extent},
               {"extent_y", cfg.grid.extent_y}};
  j["fingerprint"] = op.fingerprint;
  j["constants"] = {{"alpha", op.constants.alpha},
                    {"continuity_m", op.constants.continuity_m},
                    {"poincare_cp", op.constants.poincare_cp}};
  const auto n = op.eigenvalues.size();
  j["mode_count"] = n;
  j["lambda_min_positive"] = n > 1 ? op.eigenvalues[1] : 0.0;
  j["lambda_max"] = op.eigenvalues[n - 1];
  nlohmann::json head = nlohmann::json::array();
  for (Eigen::Index k = 0; k < n && k < 9; ++k) head.push_back(op.eigenvalues[k]);
  j["eigenvalues_head"] = head;
  if (with_noise) {
    nlohmann::json noise;
    noise["modes"] = spectrum.modes();
    noise["trace"] = spectrum.trace;
    noise["extrapolated_trace"] = spectrum.extrapolated_trace;
    const auto summ = check_summability(spectrum, op);
    noise["summability"] = {{"s_half", summ.s_half},
                            {"s_sq", summ.s_sq},
                            {"slope_half", summ.slope_half},
                            {"slope_sq", summ.slope_sq},
                            {"half_verdict", tail_verdict_name(summ.half_verdict)},
                            {"sq_verdict", tail_verdict_name(summ.sq_verdict)}};
    j["noise"] = noise;
  }
  return j;
}

inline nlohmann::json simulate_json(const TrajectoryRecord& rec) {
  nlohmann::json j;
  j["name"] = "simulate";
  j["blew_up"] = rec.blew_up;
  j["blowup_time"] = rec.blew_up ? nlohmann::json(rec.blowup_time) : nlohmann::json(nullptr);
  j["steps_taken"] = rec.steps_taken;
  j["records"] = rec.states.size();
  j["final_t"] = rec.states.empty() ? 0.0 : rec.states.back().t;
  if (!rec.ledger.rows.empty()) {
    const auto& last = rec.ledger.rows.back();
    j["final"] = {{"norm_u_H2", last.norm_u_h2},
                  {"norm_w_H2", last.norm_w_h2},
                  {"norm_u_V2", last.norm_u_v2},
                  {"u_L4_4", last.u_l4_4}};
  }
  j["quartic"] = {{"a", rec.ledger.quartic_a},
                  {"b", rec.ledger.quartic_b},
                  {"c", rec.ledger.quartic_c},
                  {"violated", rec.ledger.quartic_violated}};
  return j;
}

}  // namespace detail

inline ExperimentReport run_experiment(const std::string& kind, const ResolvedConfig& cfg,
                                       const SimInputs& si, const McConfig& mc) {
  const auto& e = cfg.experiment;
  if (kind == "small-noise") return small_noise_deviation(e.epsilons, si, mc, e.ratio_bound);
  if (kind == "tail") return tail_probability(e.r, e.epsilon, e.horizon, si, mc);
  if (kind == "stationary")
    return stationary_coupling(e.eps1, e.eps2, e.burn_in, e.horizon, si, mc,
                               e.stationarity_hypotheses);
  if (kind == "support") return invariant_support(si, e.horizons, mc);
  throw std::runtime_error("unknown experiment kind '" + kind + "'");
}

inline int run_cli(const CliOptions& opt) try {
  ResolvedConfig cfg =
      opt.config_path.empty() ? ResolvedConfig{} : parse_config(opt.config_path);
  if (opt.seed_override) cfg.experiment.seed = *opt.seed_override;
  if (opt.replicas_override) cfg.experiment.replicas = *opt.replicas_override;
  if (opt.threads_override) cfg.experiment.threads = *opt.threads_override;
  if (cfg.experiment.replicas < 2)
    throw std::runtime_error("replicas must be at least 2");
  if (cfg.experiment.threads < 1) throw std::runtime_error("threads must be at least 1");

  const std::string echo = resolved_ini(cfg);
  const std::string cmd_token = opt.command == "experiment"
                                    ? "experiment-" + opt.experiment_kind
                                    : opt.command;
  const auto dir = create_run_dir(resolve_out_root(opt.out_root), cfg.experiment.seed,
                                  cmd_token);
  *opt.err << "run directory: " << dir.string() << "\n";

  const auto grid = build_grid(cfg);
  const auto op = build_operator(cfg, grid);
  const auto spectrum = build_spectrum(cfg, op);
  const auto model = build_model(cfg);

  RunManifest manifest;
  manifest.command = cmd_token;
  manifest.master_seed = cfg.experiment.seed;
  manifest.operator_fingerprint = op.fingerprint;
  manifest.config_echo = echo;
  manifest.started_at = iso_utc_now();
  write_atomic(dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
  write_atomic(dir / "config.resolved.ini", echo);
  manifest.outputs.push_back("config.resolved.ini");

  nlohmann::json report;
  int exit_code = 0;

  if (opt.command == "operator-info") {
    report = detail::operator_info_json(cfg, op, spectrum, opt.with_noise);
  } else if (opt.command == "check-model") {
    const Box box{-cfg.sim.box_u, cfg.sim.box_u, -cfg.sim.box_w, cfg.sim.box_w};
    const auto cr = check_model(model, op.constants.alpha, op.constants.poincare_cp, box);
    report = condition_report_json(model, cr);
    exit_code = report["certified"].get<bool>() ? 0 : 2;
  } else if (opt.command == "simulate") {
    const auto rec = simulate(build_initial(cfg, grid), build_sim_config(cfg), op, model,
                              spectrum, cfg.experiment.seed);
    write_atomic(dir / "ledger.csv", ledger_csv(rec.ledger));
    manifest.outputs.push_back("ledger.csv");
    report = detail::simulate_json(rec);
    if (rec.blew_up) *opt.err << "trajectory blew up at t = " << rec.blowup_time << "\n";
  } else if (opt.command == "experiment") {
    SimInputs si;
    si.initial = build_initial(cfg, grid);
    si.config = build_sim_config(cfg);
    si.op = &op;
    si.model = &model;
    si.spectrum = &spectrum;
    McConfig mc;
    mc.replicas = cfg.experiment.replicas;
    mc.master_seed = cfg.experiment.seed;
    mc.confidence_multiplier = cfg.experiment.confidence_multiplier;
    mc.threads = cfg.experiment.threads;
    const auto rep = run_experiment(opt.experiment_kind, cfg, si, mc);
    write_atomic(dir / "replicas.csv", replica_csv(rep));
    manifest.outputs.push_back("replicas.csv");
    report = report_json(rep);
    for (const auto& d : rep.diagnostics) *opt.err << d << "\n";
    exit_code = verdict_exit_code(rep.verdict);
  } else {
    throw std::runtime_error("unknown command '" + opt.command + "'");
  }

  const std::string report_text = report.dump(2) + "\n";
  write_atomic(dir / "report.json", report_text);
  manifest.outputs.push_back("report.json");
  manifest.finished_at = iso_utc_now();
  write_atomic(dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
  *opt.out << report_text;
  return exit_code;
} catch (const std::exception& e) {
  *opt.err << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace bidosim
