#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "sievelab/config.hpp"
#include "sievelab/runner.hpp"
#include "sievelab/util.hpp"

// Exit codes: 0 success, 2 configuration error (including CLI usage), 3
// run-time failure (mesh or solver).
int main(int argc, char** argv) {
  CLI::App app{"sievelab: finite-element experiments for sieve-type interface limits"};
  app.require_subcommand(1);

  std::string config_path;
  sievelab::RunOverrides ov;

  CLI::App* cmd_run = app.add_subcommand("run", "execute an experiment config");
  cmd_run->add_option("config", config_path, "JSON experiment config")->required();
  cmd_run->add_option("--out", ov.out, "output directory (overrides run.out and SIEVELAB_OUT)");
  cmd_run->add_option("--jobs", ov.jobs, "worker threads for cell/gamma grids");
  cmd_run->add_flag("--quiet", ov.quiet, "suppress progress output");

  CLI::App* cmd_validate = app.add_subcommand("validate", "check a config without running");
  cmd_validate->add_option("config", config_path, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, usage errors are config errors
  }

  try {
    sievelab::ExperimentConfig cfg = sievelab::load_config(config_path);
    if (app.got_subcommand(cmd_validate)) {
      std::printf("ok\n%s\n", cfg.resolved.dump(2).c_str());
      return 0;
    }
    sievelab::run_experiment(cfg, ov);
    return 0;
  } catch (const sievelab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 3;
  }
}
