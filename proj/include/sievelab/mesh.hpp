#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "sievelab/geometry.hpp"

namespace sievelab {

struct TriIndex {
  int a = 0, b = 0, c = 0;  // CCW
};

// Interface edge with one node pair per side. p* live on the plus side
// (the side nu0 points to), m* on the minus side. p1/m1 sit at arc
// coordinate s0, p2/m2 at s1. At a tip interior to the domain the pair
// degenerates to a single shared node (p == m).
struct InterfaceEdge {
  int p1 = 0, p2 = 0;
  int m1 = 0, m2 = 0;
  double s0 = 0.0, s1 = 0.0;  // arc-length coordinates, s0 < s1
  double len = 0.0;           // physical edge length
};

// Conforming triangulation of the domain with the interface realized as a
// union of edges. Vertices on the interface are duplicated (one node per
// side) except at tips interior to the domain, which keep a single node.
// No triangle crosses the interface.
struct InterfaceMesh {
  std::vector<Vec2> nodes;
  std::vector<TriIndex> triangles;
  std::vector<InterfaceEdge> edges;   // ascending in s0
  std::vector<int8_t> tri_side;       // +1/-1 if traversing an interface edge, else 0
  double target_h = 0.0;
  double max_diameter = 0.0;          // longest triangle edge
  int n_base_nodes = 0;               // grid nodes before duplication

  int n_duplicated() const { return static_cast<int>(nodes.size()) - n_base_nodes; }
};

// Requires an axis-aligned base segment. Structured grid; rows within
// r0/2 of the base line follow the profile exactly and relax to straight
// lines at distance r0 (so strips with rho < r0/2 are exact row bands).
InterfaceMesh triangulate(const Domain& dom, const Interface& itf, double h);

enum class EdgeState : std::uint8_t { Tied, Free, Penalized };

// Per-edge coupling plus removed triangles. apply_sieve only emits
// Tied/Free; Penalized appears when a finite-weight measure is attached
// by the solver.
struct CouplingPattern {
  std::vector<EdgeState> state;
  std::vector<double> theta;      // finite positive weight where Penalized
  std::vector<std::uint8_t> removed;
  double max_snap_displacement = 0.0;

  bool same_coupling(const CouplingPattern& other) const {
    return state == other.state && theta == other.theta && removed == other.removed;
  }
};

CouplingPattern all_tied(const InterfaceMesh& mesh);

// CrackSubset: edges inside a wall interval (after snapping interval ends
// to interface vertices) become Free, the rest Tied. Polygon: triangles
// with centroid inside a component are removed and interface edges inside
// become Free. Errors if snapping exceeds h/2 or collapses a wall/gap.
CouplingPattern apply_sieve(const InterfaceMesh& mesh, const CompactSet& k);

// One coefficient per active node; Tied pairs share one coefficient.
struct DofMap {
  std::vector<int> node_dof;            // -1 for inactive nodes
  std::vector<std::uint8_t> tri_active;
  int n_dofs = 0;
};

DofMap build_dof_map(const InterfaceMesh& mesh, const CouplingPattern& pattern);

struct Field {
  const InterfaceMesh* mesh = nullptr;
  DofMap dofs;
  Eigen::VectorXd coeffs;

  double at_node(int n) const {
    int d = dofs.node_dof[static_cast<std::size_t>(n)];
    return d >= 0 ? coeffs[d] : 0.0;
  }
};

Field make_field(const InterfaceMesh& mesh, const CouplingPattern& pattern);
// Nodal clamp to [-t, t].
Field clamped(const Field& u, double t);

// Nodewise jump [u] = |u+ - u-| at both ends of each interface edge.
struct EdgeJump {
  double j1 = 0.0, j2 = 0.0;
};
std::vector<EdgeJump> jump_of(const Field& u);

enum class NodeTag : std::uint8_t { None, DirichletOne, DirichletZero };

// Strip submesh for cell problems: Dirichlet one on Sigma_rho^+, zero on
// Sigma_rho^-, natural lateral boundary.
struct CellMesh {
  InterfaceMesh mesh;
  std::vector<NodeTag> tags;      // per node
  double rho = 0.0;
  double interface_length = 0.0;  // sum of interface edge lengths
  std::vector<int> parent_node;   // restricted meshes only
};

// Extracts the triangles of `mesh` inside the strip. The offsets +-rho must
// match existing node rows (error otherwise, or if the submesh is empty).
CellMesh restrict_to_strip(const InterfaceMesh& mesh, const Interface& itf,
                           const StripRegion& region);

// Builds a strip mesh directly over the arc-length window [w.s0, w.s1]
// with `rows` element rows per side and along-interface spacing <= h_along.
CellMesh build_strip_mesh(const Interface& itf, ArcInterval window, double rho,
                          double h_along, int rows);

}  // namespace sievelab
