// Command-line front end: validates experiment configs, dispatches to the
// condition certifier, the closed-form bounds and the Monte Carlo runner,
// and writes CSV/JSON results.
//
// Exit codes: 0 pass, 1 dominance failure, 2 config error, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sgdlab/experiment.hpp"
#include "sgdlab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sgdlab: SGD stability and concentration laboratory"};
  app.set_version_flag("--version", std::string("sgdlab ") + sgdlab::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  bool out_given = false;
  unsigned hw = std::thread::hardware_concurrency();
  int threads = hw == 0 ? 1 : static_cast<int>(hw);
  bool dry_run = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file (JSON)")->required();
    cmd->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
      seed_given = true;
    });
    cmd->add_option("--out", out_dir, "output directory override")->each([&](const std::string&) {
      out_given = true;
    });
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_flag("--dry-run", dry_run, "validate and print the plan, no computation");
  };

  CLI::App* check = app.add_subcommand("check-conditions",
                                       "certify the local convexity conditions over N_r(X)");
  add_common(check);
  CLI::App* bounds = app.add_subcommand("bounds", "evaluate the closed-form bounds");
  add_common(bounds);
  CLI::App* simulate =
      app.add_subcommand("simulate", "run the Monte Carlo experiment and compare to the bounds");
  add_common(simulate);

  CLI11_PARSE(app, argc, argv);

  sgdlab::RunOptions options;
  if (seed_given) options.seed_override = seed;
  if (out_given) options.out_override = out_dir;
  options.threads = threads;
  options.dry_run = dry_run;

  try {
    if (check->parsed()) return sgdlab::run_check_conditions(config_path, options, std::cout);
    if (bounds->parsed()) return sgdlab::run_bounds(config_path, options, std::cout);
    return sgdlab::run_simulate(config_path, options, std::cout);
  } catch (const sgdlab::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return sgdlab::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sgdlab::kExitIoError;
  }
}
