#include <bidosim/cli.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"bidosim: spectral simulator and Monte-Carlo bound-check harness "
               "for stochastic reaction-diffusion systems"};
  app.require_subcommand(1);

  bidosim::CliOptions opt;
  std::uint64_t seed = 0;
  int replicas = 0, threads = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", opt.config_path, "configuration file (INI)");
    cmd->add_option("-o,--out", opt.out_root,
                    "output root directory (default: $BIDOSIM_OUT_DIR or ./runs)");
    cmd->add_option("--seed", seed, "override [experiment] seed");
    cmd->add_option("--replicas", replicas, "override [experiment] replicas");
    cmd->add_option("--threads", threads, "override [experiment] threads");
  };

  auto* info = app.add_subcommand("operator-info",
                                  "eigenstructure and constants of the configured operator");
  info->add_flag("--noise", opt.with_noise, "include noise spectrum and summability report");
  add_common(info);

  auto* check = app.add_subcommand("check-model",
                                   "fit growth/dissipation/monotonicity constants and "
                                   "evaluate the coefficient condition");
  add_common(check);

  auto* sim = app.add_subcommand("simulate", "run one trajectory and write its energy ledger");
  add_common(sim);

  auto* exp = app.add_subcommand("experiment", "run a Monte-Carlo bound check");
  exp->add_option("kind", opt.experiment_kind, "small-noise | tail | stationary | support")
      ->required()
      ->check(CLI::IsMember({"small-noise", "tail", "stationary", "support"}));
  add_common(exp);

  CLI11_PARSE(app, argc, argv);

  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed_override = seed;
  if (sub->count("--replicas")) opt.replicas_override = replicas;
  if (sub->count("--threads")) opt.threads_override = threads;
  opt.command = sub->get_name();
  return bidosim::run_cli(opt);
}
