#pragma once

#include <vector>

#include "sievelab/energy.hpp"
#include "sievelab/mesh.hpp"

namespace sievelab {

struct SolverOptions {
  double linear_tol = 1e-10;   // CG relative residual
  int max_linear_iter = 20000;
  double armijo_c = 1e-4;      // sufficient-decrease constant
  double backtrack = 0.5;
  double energy_stop = 1e-10;  // relative energy decrease per step
  double grad_stop = 1e-6;     // scaled gradient max-norm target
  int max_descent_iter = 20000;
  unsigned seed = 0;           // deterministic initialization / probes

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;        // CG relative residual, or gradient max-norm
  bool converged = false;
  bool quadratic_path = false;  // assembled SPD system (p = q = 2)
};

struct SolveResult {
  Field u;
  double value = 0.0;  // minimum of the discrete functional
  SolveStats stats;
};

// Tied where the weight is infinite, free where zero, penalized (carrying
// theta) where finite positive. Weights are read at edge arc midpoints; no
// triangles are removed.
CouplingPattern pattern_from_measure(const InterfaceMesh& mesh, const InterfaceMeasure& mu);

// Global problem min bulk + jump + lower over the whole mesh. Exactly one
// of pattern (perforated run: coupling from a concrete sieve, no penalty
// term) and mu (transmission run: coupling and penalty from the measure)
// must be non-null. For p = q = 2 the SPD system stiffness + penalty + mass
// is solved by preconditioned conjugate gradients; otherwise by diagonally
// scaled descent with Armijo backtracking from the zero field.
SolveResult solve_global(const InterfaceMesh& mesh, const CouplingPattern* pattern,
                         const InterfaceMeasure* mu, const BulkConfig& bulk,
                         const LowerOrderConfig& low, const SolverOptions& opts = {});

// Strip cell problem min bulk (+ jump when penalized) subject to u = 1 on
// the DIRICHLET_ONE nodes and u = 0 on the DIRICHLET_ZERO nodes, natural
// lateral boundary, by DOF elimination. Returns the minimiser and m.
SolveResult solve_cell(const CellMesh& cell, const CouplingPattern& coupling,
                       const BulkConfig& bulk, const SolverOptions& opts = {});
SolveResult solve_cell(const CellMesh& cell, const InterfaceMeasure& coupling,
                       const BulkConfig& bulk, const SolverOptions& opts = {});

struct CapacityOptions {
  double h = 1.0 / 64;  // target spacing (angular arc and radial step)
  SolverOptions solver;
};

// Condenser p-capacity (1 < p <= 2): minimum of the p-Dirichlet integral
// over fields equal to 1 on the inner polygon and 0 on the outer boundary.
// Both polygons must be star shaped about the inner centroid; the region
// between them is meshed by rays through the merged vertex angles with
// log-spaced radii. An empty inner polygon gives 0.
double capacity(const std::vector<Vec2>& outer, const std::vector<Vec2>& inner, double p,
                const CapacityOptions& opts = {});
// Outer boundary taken as the domain rectangle.
double capacity(const Domain& dom, const std::vector<Vec2>& inner, double p,
                const CapacityOptions& opts = {});

// CCW regular n-gon, vertex 0 at angle 0.
std::vector<Vec2> regular_ngon(Vec2 center, double radius, int n);

}  // namespace sievelab
