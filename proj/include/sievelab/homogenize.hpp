#pragma once

#include <string>
#include <vector>

#include "sievelab/solve.hpp"

namespace sievelab {

struct CellParams {
  double h_along = 1.0 / 64;  // along-interface spacing of the strip meshes
  int rows = 8;               // element rows per strip side
  int tail_window = 3;        // trailing entries entering the tail statistics
  int jobs = 1;               // concurrent cell solves
  SolverOptions solver;
};

struct CellEntry {
  double m = 0.0;           // cell minimum (NaN when the cell failed)
  double per_length = 0.0;  // m divided by the window interface length
  std::string error;        // resolution/solver failure note, empty when ok
};

// Values m over a (rho, j) grid for one interface window. The window is an
// arc-length interval; together with rho it describes the sub-rectangle
// window x (-rho, rho) of the interface cylinder in frame coordinates.
struct CellTable {
  ArcInterval window;
  double interface_length = 0.0;  // realized window length on the polyline
  std::vector<double> rhos;       // decreasing
  std::vector<int> js;            // ascending
  std::vector<std::vector<CellEntry>> values;  // [rho index][j index]
  int tail_window = 3;

  struct Tail {
    double lo = 0.0, hi = 0.0;  // min/max of per_length over the tail
    double mean = 0.0;
    int count = 0;  // valid entries found (up to tail_window)
  };
  // Statistics over the trailing tail_window valid entries of one rho row.
  Tail tail(std::size_t rho_index) const;
};

// Sieve-driven table: per (rho, j) build the strip mesh over the window,
// realize sieve_at(spec, j) on it and solve the cell problem. Failed cells
// are recorded as gaps with a note; the table is still returned.
CellTable cell_table(const SieveSpec& spec, const Interface& itf, ArcInterval window,
                     const std::vector<double>& rhos, const std::vector<int>& js,
                     const BulkConfig& bulk, const CellParams& params);
// Measure-driven table (values are j-independent; the j range is looped so
// the tail statistics run through one code path).
CellTable cell_table(const InterfaceMeasure& mu, const Interface& itf, ArcInterval window,
                     const std::vector<double>& rhos, const std::vector<int>& js,
                     const BulkConfig& bulk, const CellParams& params);

struct EqualityFlag {
  double rho = 0.0;
  int valid = 0;             // valid tail entries
  double tail_min = 0.0, tail_max = 0.0;
  double oscillation = 0.0;  // (max - min) / max(max, floor)
  bool holds = false;
};

// Tail min/max surrogates for the lower/upper j-limits of one table row;
// the flag asserts their relative agreement. Requires at least 3 entries
// in the j range.
std::vector<EqualityFlag> equality_condition(const CellTable& table, double tol);

struct WindowEstimate {
  ArcInterval window;
  double theta_hat = 0.0;             // 0, finite, or +infinity
  double chosen_rho = 0.0;            // smallest reliable rho (the estimate's row)
  double m_bar = 0.0;                 // tail-mean per-length at chosen_rho
  double spread = 0.0;                // relative spread of finite inversions
  std::vector<double> theta_by_rho;   // inversion per rho (NaN where unusable)
  std::vector<std::uint8_t> rho_reliable;
  bool reliable = false;              // some rho row passed the tail check
  bool subsequence_dependent = false; // set when no row passed (estimate kept)
};

struct ReconstructedDensity {
  std::vector<WindowEstimate> windows;

  // Piecewise-constant density: one weighted arc per window over the given
  // default weight elsewhere.
  InterfaceMeasure measure(double default_weight) const;
};

// Invert the flat-strip relation m = theta / (1 + 2 rho theta) per rho and
// take the smallest reliable rho. Saturated inversions (1 - 2 rho m below
// tolerance) give infinity, tiny m gives zero.
ReconstructedDensity reconstruct_theta(const CellTable& table, double equality_tol = 0.05);
ReconstructedDensity reconstruct_theta(const std::vector<CellTable>& tables,
                                       double equality_tol = 0.05);

struct GammaParams {
  double h = 1.0 / 64;      // target size of the shared mesh family
  double distance_q = 2.0;  // exponent of the reported distances
  int jobs = 1;
  SolverOptions solver;
};

struct JRecord {
  int j = 0;
  double min_value = 0.0;
  double lq_distance = 0.0;  // distance between the j-minimiser and the limit one
  double energy_gap = 0.0;   // min_value - limit value
  SolveStats stats;
};

struct ConvergenceReport {
  std::vector<JRecord> per_j;
  double limit_value = 0.0;
  double limit_norm = 0.0;  // L^q norm of the limit minimiser
  SolveStats limit_stats;
  double q = 2.0;
  // Diagnostics derived from the rows above (never an assertion beyond the
  // computed range).
  bool distances_decreasing = false;       // strictly, over all recorded j
  bool tail_gaps_nonincreasing = false;    // |energy_gap| over the last three
  double final_relative_distance = 0.0;    // last distance / limit norm
  double final_relative_gap = 0.0;         // last |gap| / |limit value|
};

// Solves the perforated problem per j and the limit transmission problem
// once on one shared mesh, and records distances and minimum-value gaps.
ConvergenceReport gamma_harness(const SieveSpec& spec, const InterfaceMeasure& mu,
                                const Domain& dom, const Interface& itf, const BulkConfig& bulk,
                                const LowerOrderConfig& low, const std::vector<int>& js,
                                const GammaParams& params);

struct MonotoneReport {
  std::vector<double> min_values;  // per ladder entry
  double limit_value = 0.0;
  bool nondecreasing = false;      // within solver tolerance
  double final_gap = 0.0;          // limit_value - last entry
  double final_relative_gap = 0.0;
};

// Transmission minima along a pointwise nondecreasing measure ladder,
// compared against the explicit limit measure. The pointwise ordering is
// checked at the mesh's edge midpoints.
MonotoneReport monotone_limit_check(const InterfaceMesh& mesh,
                                    const std::vector<InterfaceMeasure>& ladder,
                                    const InterfaceMeasure& limit, const BulkConfig& bulk,
                                    const LowerOrderConfig& low, const SolverOptions& opts = {});

}  // namespace sievelab
