#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sievelab/solve.hpp"
#include "sievelab/util.hpp"

using namespace sievelab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Vertical interface x = 0 in (-1,1) x (0,1): the quasi-1d configuration.
// The step datum is given nodally so the duplicated interface nodes carry
// the side-correct value (a closed form of x is ambiguous exactly at x = 0).
struct Quasi1DSetup {
  Domain dom{-1.0, 1.0, 0.0, 1.0};
  Interface itf = build_interface({0.0, 0.0}, {0.0, 1.0}, {}, true);
  InterfaceMesh mesh;
  LowerOrderConfig low;
  explicit Quasi1DSetup(double h) {
    mesh = triangulate(dom, itf, h);
    low.h_nodal.resize(mesh.nodes.size());
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n) low.h_nodal[n] = plus_side(n) ? 1.0 : 0.0;
  }
  // duplicated copies (appended past n_base_nodes) sit on the minus side
  bool plus_side(std::size_t n) const {
    return mesh.nodes[n].x > 0.0 ||
           (mesh.nodes[n].x == 0.0 && n < static_cast<std::size_t>(mesh.n_base_nodes));
  }
};

double max_jump(const Field& u) {
  double m = 0.0;
  for (const EdgeJump& j : jump_of(u)) m = std::max({m, j.j1, j.j2});
  return m;
}

}  // namespace

TEST_CASE("pattern_from_measure classifies edges by weight") {
  Quasi1DSetup s(0.125);
  InterfaceMeasure mu;
  mu.default_weight = kInf;
  mu.pieces.push_back({{0.0, 0.25}, 0.0});
  mu.pieces.push_back({{0.25, 0.5}, 4.0});
  CouplingPattern pat = pattern_from_measure(s.mesh, mu);
  REQUIRE(pat.state.size() == s.mesh.edges.size());
  for (std::size_t e = 0; e < s.mesh.edges.size(); ++e) {
    double mid = 0.5 * (s.mesh.edges[e].s0 + s.mesh.edges[e].s1);
    if (mid < 0.25) {
      CHECK(pat.state[e] == EdgeState::Free);
    } else if (mid < 0.5) {
      CHECK(pat.state[e] == EdgeState::Penalized);
      CHECK(pat.theta[e] == 4.0);
    } else {
      CHECK(pat.state[e] == EdgeState::Tied);
    }
  }
  CHECK(std::count(pat.removed.begin(), pat.removed.end(), 1) == 0);
}

TEST_CASE("solve_global demands exactly one coupling source") {
  Quasi1DSetup s(0.25);
  BulkConfig bulk;
  CouplingPattern pat = all_tied(s.mesh);
  InterfaceMeasure mu;
  CHECK_THROWS_AS(solve_global(s.mesh, nullptr, nullptr, bulk, s.low), SolveError);
  CHECK_THROWS_AS(solve_global(s.mesh, &pat, &mu, bulk, s.low), SolveError);
}

TEST_CASE("transmission solve matches the separable closed form") {
  Quasi1DSetup s(1.0 / 64);
  BulkConfig bulk;
  InterfaceMeasure mu;
  mu.default_weight = 1.0;
  SolveResult r = solve_global(s.mesh, nullptr, &mu, bulk, s.low);
  CHECK(r.stats.converged);
  CHECK(r.stats.quadratic_path);

  oracle::Quasi1D ex = oracle::quasi1d(1.0);
  for (const EdgeJump& j : jump_of(r.u)) {
    CHECK(j.j1 == doctest::Approx(ex.jump).epsilon(0.015));
    CHECK(j.j2 == doctest::Approx(ex.jump).epsilon(0.015));
  }
  // conforming approximation: discrete minimum sits just above the true one
  CHECK(r.value >= ex.min_value() - 1e-12);
  CHECK(r.value == doctest::Approx(ex.min_value()).epsilon(0.01));
  // solution profile at a few probe nodes
  for (std::size_t n = 0; n < s.mesh.nodes.size(); n += 37) {
    double x = s.mesh.nodes[n].x;
    double exact = (x == 0.0) ? ex.u(s.plus_side(n) ? 1e-14 : -1e-14) : ex.u(x);
    CHECK(r.u.at_node(static_cast<int>(n)) == doctest::Approx(exact).epsilon(0.02));
  }
}

TEST_CASE("tied and free couplings reproduce their closed forms") {
  Quasi1DSetup s(1.0 / 64);
  BulkConfig bulk;

  InterfaceMeasure tied;  // default inf
  SolveResult rt = solve_global(s.mesh, nullptr, &tied, bulk, s.low);
  oracle::Quasi1D ext = oracle::quasi1d(kInf);
  CHECK(max_jump(rt.u) == doctest::Approx(0.0));
  CHECK(rt.value == doctest::Approx(ext.min_value()).epsilon(0.01));
  CHECK(rt.value >= ext.min_value() - 1e-12);

  // fully decoupled: each half relaxes to its own constant datum exactly,
  // so the discrete solution coincides with the continuum one
  InterfaceMeasure free_mu;
  free_mu.default_weight = 0.0;
  SolveResult rf = solve_global(s.mesh, nullptr, &free_mu, bulk, s.low);
  CHECK(rf.value <= 1e-12);  // datum is feasible: only solver tolerance remains
  for (std::size_t n = 0; n < s.mesh.nodes.size(); ++n) {
    double expect = s.plus_side(n) ? 1.0 : 0.0;
    CHECK(std::abs(rf.u.at_node(static_cast<int>(n)) - expect) < 1e-6);
  }
}

TEST_CASE("zero datum gives the zero minimiser") {
  Quasi1DSetup s(0.125);
  s.low = {};
  s.low.h = [](double, double) { return 0.0; };
  BulkConfig bulk;
  InterfaceMeasure mu;
  mu.default_weight = 2.0;
  SolveResult r = solve_global(s.mesh, nullptr, &mu, bulk, s.low);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.u.coeffs.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("perforated solve with an explicit pattern") {
  Quasi1DSetup s(1.0 / 64);
  BulkConfig bulk;
  // fully freed interface == weight-zero measure
  CouplingPattern freed = all_tied(s.mesh);
  for (auto& st : freed.state) st = EdgeState::Free;
  SolveResult r = solve_global(s.mesh, &freed, nullptr, bulk, s.low);
  CHECK(r.value <= 1e-12);
  CHECK(max_jump(r.u) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cell problems: tied, penalized and free strips") {
  Interface itf = build_interface({0.0, 0.0}, {1.0, 0.0});
  const double rho = 0.125;
  CellMesh cell = build_strip_mesh(itf, {0.25, 0.75}, rho, 1.0 / 64, 8);
  BulkConfig bulk;

  CouplingPattern tied = all_tied(cell.mesh);
  SolveResult rt = solve_cell(cell, tied, bulk);
  CHECK(rt.stats.converged);
  // linear ramp across the strip: m = L / (2 rho) exactly
  CHECK(rt.value == doctest::Approx(0.5 * oracle::cell_tied_per_length(rho)).epsilon(1e-10));

  for (double theta : {0.5, 2.0, 8.0}) {
    InterfaceMeasure mu;
    mu.default_weight = theta;
    SolveResult rp = solve_cell(cell, mu, bulk);
    CHECK(rp.value == doctest::Approx(0.5 * oracle::cell_per_length(theta, rho)).epsilon(1e-10));
    for (int n = 0; n < static_cast<int>(cell.mesh.nodes.size()); ++n) {
      double v = rp.u.at_node(n);
      CHECK(v >= -1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }

  InterfaceMeasure free_mu;
  free_mu.default_weight = 0.0;
  SolveResult rf = solve_cell(cell, free_mu, bulk);
  CHECK(rf.value == doctest::Approx(0.0));

  CellMesh untagged = cell;
  untagged.tags.assign(untagged.tags.size(), NodeTag::None);
  CHECK_THROWS_AS(solve_cell(untagged, tied, bulk), SolveError);
}

TEST_CASE("descent path handles p = 3 and lands on a local minimum") {
  Quasi1DSetup s(0.125);
  BulkConfig bulk;
  bulk.p = 3.0;
  InterfaceMeasure mu;
  mu.default_weight = 1.0;
  SolveResult r = solve_global(s.mesh, nullptr, &mu, bulk, s.low);
  CHECK(r.stats.converged);
  CHECK_FALSE(r.stats.quadratic_path);

  // no nearby perturbation does better: necessary condition for a minimum
  std::mt19937 rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    Field w = r.u;
    for (int d = 0; d < w.dofs.n_dofs; ++d) w.coeffs[d] += 1e-4 * N(rng);
    auto eg = total_energy_and_gradient(w, bulk, &mu, s.low);
    REQUIRE(eg.has_value());
    CHECK(eg->value >= r.value - 1e-8);
  }

  // convexity: interpolating toward the zero field never drops below r.value
  Field zero = r.u;
  zero.coeffs.setZero();
  for (double t : {0.25, 0.5, 0.75}) {
    Field w = r.u;
    w.coeffs = (1.0 - t) * r.u.coeffs + t * zero.coeffs;
    CHECK(total_energy_and_gradient(w, bulk, &mu, s.low)->value >= r.value - 1e-8);
  }
}

TEST_CASE("condenser capacity: annulus benchmark and edge cases") {
  CapacityOptions opts;
  opts.h = 1.0 / 32;
  std::vector<Vec2> outer = regular_ngon({0.0, 0.0}, 1.0, 64);
  std::vector<Vec2> inner = regular_ngon({0.0, 0.0}, 0.1, 64);
  double cap = capacity(outer, inner, 2.0, opts);
  CHECK(cap == doctest::Approx(oracle::annulus_capacity(0.1, 1.0)).epsilon(0.01));
  // capacity is monotone in the inner set
  double cap_big = capacity(outer, regular_ngon({0.0, 0.0}, 0.2, 64), 2.0, opts);
  CHECK(cap_big > cap);

  CHECK(capacity(outer, {}, 2.0, opts) == 0.0);
  CHECK_THROWS_AS(capacity(outer, inner, 3.0, opts), ConfigError);
  CHECK_THROWS_AS(capacity(outer, inner, 1.0, opts), ConfigError);
  std::vector<Vec2> touching = regular_ngon({0.0, 0.0}, 1.0, 16);
  CHECK_THROWS_AS(capacity(outer, touching, 2.0, opts), GeometryError);

  // receding outer boundary lowers the capacity; the square encloses the
  // unit circle and sits inside radius sqrt(2)
  Domain dom{-1.0, 1.0, -1.0, 1.0};
  double cap_rect = capacity(dom, inner, 2.0, opts);
  CHECK(cap_rect < cap);
  CHECK(cap_rect > oracle::annulus_capacity(0.1, std::sqrt(2.0)) * 0.99);
}

TEST_CASE("regular polygons are CCW with the requested radius") {
  std::vector<Vec2> hex = regular_ngon({1.0, 2.0}, 0.5, 6);
  REQUIRE(hex.size() == 6);
  CHECK(polygon_area(hex) > 0.0);
  for (Vec2 v : hex) CHECK(norm(v - Vec2{1.0, 2.0}) == doctest::Approx(0.5));
  CHECK(hex[0].x == doctest::Approx(1.5));
  CHECK_THROWS_AS(regular_ngon({0, 0}, 1.0, 2), GeometryError);
}

TEST_CASE("solver options validation") {
  SolverOptions bad;
  bad.linear_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.backtrack = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.max_descent_iter = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
