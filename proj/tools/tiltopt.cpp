// tiltopt - multi-agent RL antenna tilt optimization benchmark.
//
// Subcommands: pretrain, evaluate, report, config.
// Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 training divergence.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiltopt/commands.hpp"
#include "tiltopt/errors.hpp"

namespace {

void add_common(CLI::App* cmd, tiltopt::cli::CommandOptions& options, bool with_variants) {
  cmd->add_option("--config", options.config_path, "JSON config file (partial overrides allowed)");
  cmd->add_option("--seed", options.seed, "master seed override");
  cmd->add_option("--scale", options.scale, "episode-count scale override");
  cmd->add_option("--workers", options.workers, "worker threads for evaluation episodes");
  cmd->add_option("--out", options.out_dir, "output directory")->capture_default_str();
  if (with_variants) {
    cmd->add_option("--variants", options.variants, "variants to run (ES, RLEN, RLIN, RLIN+)")
        ->delimiter(',');
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent RL remote electrical tilt optimization benchmark"};
  app.require_subcommand(1);

  tiltopt::cli::CommandOptions pretrain_opts, evaluate_opts, report_opts;

  CLI::App* pretrain = app.add_subcommand("pretrain", "pre-train shared Q-networks offline");
  add_common(pretrain, pretrain_opts, true);

  CLI::App* evaluate = app.add_subcommand("evaluate", "run paired evaluation campaigns");
  add_common(evaluate, evaluate_opts, true);
  evaluate->add_flag("--debug-dump", evaluate_opts.debug_dump,
                     "also dump layout.csv and snapshot_ep0.csv");

  CLI::App* report = app.add_subcommand("report", "regenerate report.csv and charts from traces");
  report->add_option("--out", report_opts.out_dir, "output directory")->capture_default_str();

  bool print_defaults = false, explain = false;
  CLI::App* config_cmd = app.add_subcommand("config", "inspect configuration defaults");
  config_cmd->add_flag("--print-defaults", print_defaults, "print the default config as JSON");
  config_cmd->add_flag("--explain", explain, "describe every config field and default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (pretrain->parsed()) tiltopt::cli::cmd_pretrain(pretrain_opts);
    if (evaluate->parsed()) tiltopt::cli::cmd_evaluate(evaluate_opts);
    if (report->parsed()) tiltopt::cli::cmd_report(report_opts);
    if (config_cmd->parsed()) tiltopt::cli::cmd_config(print_defaults, explain);
  } catch (const tiltopt::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tiltopt::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tiltopt::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
