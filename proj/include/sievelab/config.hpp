#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sievelab/energy.hpp"
#include "sievelab/geometry.hpp"
#include "sievelab/solve.hpp"

namespace sievelab {

enum class RunMode { Perforated, Transmission, Cell, Reconstruct, Gamma, Capacity, Monotone };

RunMode mode_from_string(const std::string& name);
std::string mode_name(RunMode mode);

// The `run` table: what to execute and the experiment ladders.
struct RunSection {
  RunMode mode = RunMode::Transmission;
  std::string out = "out";
  int seed = 0;
  int jobs = 1;
  double h = 1.0 / 64;             // global mesh target size
  std::vector<int> js;             // sieve indices, ascending
  std::vector<double> rhos;        // strip half-widths, decreasing
  std::vector<ArcInterval> windows;
  double h_along = 1.0 / 64;       // cell strips: along-interface spacing
  int rows = 8;                    // cell strips: element rows per side
  int tail_window = 3;
  double equality_tol = 0.05;
  double distance_q = 2.0;
};

struct CapacitySection {
  std::vector<Vec2> outer;  // CCW polygon
  std::vector<Vec2> inner;
  double h = 1.0 / 64;
};

struct MonotoneSection {
  std::vector<InterfaceMeasure> ladder;  // pointwise nondecreasing
  InterfaceMeasure limit;
};

// Fully parsed and validated experiment description. `resolved` echoes the
// config with every default filled in; it is what the manifest records.
struct ExperimentConfig {
  RunSection run;
  Domain domain;
  Interface itf;
  SieveSpec sieve;
  BulkConfig bulk;
  LowerOrderConfig lower;
  InterfaceMeasure measure;
  SolverOptions solver;
  CapacitySection capacity;
  MonotoneSection monotone;

  bool has_domain = false, has_interface = false, has_sieve = false;
  bool has_lower = false, has_measure = false;
  bool has_capacity = false, has_monotone = false;
  std::string lower_h_text;  // datum expression as written

  nlohmann::json resolved;
};

// Throws ConfigError on malformed input, unknown keys (all listed), missing
// mode requirements, unsorted ladders, or geometry preconditions, naming
// the offending key paths.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace sievelab
