#pragma once

#include <string>

#include "sievelab/config.hpp"

namespace sievelab {

struct RunOverrides {
  std::string out;  // empty: resolve from config and SIEVELAB_OUT
  int jobs = 0;     // 0: keep the config value
  bool quiet = false;
};

// Output directory an experiment will write to: the --out override if
// given, else run.out, resolved against $SIEVELAB_OUT when that is set and
// the path is relative.
std::string resolve_out_dir(const ExperimentConfig& cfg, const RunOverrides& ov);

// Executes the configured mode and writes its artifacts plus manifest.json
// into the output directory. Returns that directory. Worker threads only
// run solves; every file write happens on the calling thread. Throws
// ConfigError for configuration problems and the solver/mesh error types
// for run-time failures.
std::string run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov = {});

}  // namespace sievelab
