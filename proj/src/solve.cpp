#include "sievelab/solve.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

namespace sievelab {

namespace {

const double kGauss[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

struct TriGeom {
  double area;
  Vec2 g[3];
};

TriGeom tri_geom(const InterfaceMesh& m, const TriIndex& t) {
  Vec2 p0 = m.nodes[static_cast<std::size_t>(t.a)];
  Vec2 p1 = m.nodes[static_cast<std::size_t>(t.b)];
  Vec2 p2 = m.nodes[static_cast<std::size_t>(t.c)];
  double s2 = cross(p1 - p0, p2 - p0);
  TriGeom g;
  g.area = s2 / 2.0;
  auto perp = [](Vec2 v) { return Vec2{-v.y, v.x}; };
  g.g[0] = (1.0 / s2) * perp(p2 - p1);
  g.g[1] = (1.0 / s2) * perp(p0 - p2);
  g.g[2] = (1.0 / s2) * perp(p1 - p0);
  return g;
}

double h_mid(const InterfaceMesh& m, const LowerOrderConfig& low, int i, int j) {
  if (!low.h_nodal.empty())
    return 0.5 * (low.h_nodal[static_cast<std::size_t>(i)] + low.h_nodal[static_cast<std::size_t>(j)]);
  Vec2 p = 0.5 * (m.nodes[static_cast<std::size_t>(i)] + m.nodes[static_cast<std::size_t>(j)]);
  return low.h(p.x, p.y);
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Quadratic model E(u) = u^T Q u - 2 b^T u + const over the active dofs,
// exact when p = q = 2. Both symmetric triplet orders are emitted.
struct QuadModel {
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b;
};

QuadModel assemble_quadratic(const InterfaceMesh& mesh, const DofMap& dofs,
                             const std::vector<double>& edge_w, const BulkConfig& bulk,
                             const LowerOrderConfig* low) {
  QuadModel q;
  q.b = Eigen::VectorXd::Zero(dofs.n_dofs);
  const auto& nd = dofs.node_dof;
  auto dof = [&](int n) { return nd[static_cast<std::size_t>(n)]; };

  for (std::size_t tt = 0; tt < mesh.triangles.size(); ++tt) {
    if (!dofs.tri_active[tt]) continue;
    const TriIndex& t = mesh.triangles[tt];
    TriGeom g = tri_geom(mesh, t);
    const int vid[3] = {t.a, t.b, t.c};
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector2d agj(bulk.A(0, 0) * g.g[i].x + bulk.A(0, 1) * g.g[i].y,
                          bulk.A(1, 0) * g.g[i].x + bulk.A(1, 1) * g.g[i].y);
      for (int j = 0; j < 3; ++j)
        q.trips.emplace_back(dof(vid[j]), dof(vid[i]),
                             g.area * (agj[0] * g.g[j].x + agj[1] * g.g[j].y));
    }
    if (low != nullptr) {
      for (int k = 0; k < 3; ++k) {
        int i = vid[k], j = vid[(k + 1) % 3];
        double he = h_mid(mesh, *low, i, j);
        double mij = g.area / 12.0;
        q.trips.emplace_back(dof(i), dof(i), mij);
        q.trips.emplace_back(dof(j), dof(j), mij);
        q.trips.emplace_back(dof(i), dof(j), mij);
        q.trips.emplace_back(dof(j), dof(i), mij);
        q.b[dof(i)] += g.area / 6.0 * he;
        q.b[dof(j)] += g.area / 6.0 * he;
      }
    }
  }

  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    double w = e < edge_w.size() ? edge_w[e] : 0.0;
    if (w <= 0.0) continue;
    const InterfaceEdge& ed = mesh.edges[e];
    int P1 = dof(ed.p1), M1 = dof(ed.m1), P2 = dof(ed.p2), M2 = dof(ed.m2);
    double k = w * ed.len / 3.0;   // squared end jumps
    double k2 = w * ed.len / 6.0;  // cross term
    auto sq = [&](int a, int b) {
      q.trips.emplace_back(a, a, k);
      q.trips.emplace_back(b, b, k);
      q.trips.emplace_back(a, b, -k);
      q.trips.emplace_back(b, a, -k);
    };
    sq(P1, M1);
    sq(P2, M2);
    auto cr = [&](int a, int b, double v) {
      q.trips.emplace_back(a, b, v);
      q.trips.emplace_back(b, a, v);
    };
    cr(P1, P2, k2);
    cr(M1, M2, k2);
    cr(P1, M2, -k2);
    cr(M1, P2, -k2);
  }
  return q;
}

// Essential values per dof: NaN when free.
std::vector<double> fixed_values(const DofMap& dofs, const std::vector<NodeTag>* tags) {
  std::vector<double> fv(static_cast<std::size_t>(dofs.n_dofs),
                         std::numeric_limits<double>::quiet_NaN());
  if (tags == nullptr) return fv;
  for (std::size_t n = 0; n < tags->size(); ++n) {
    if ((*tags)[n] == NodeTag::None) continue;
    int d = dofs.node_dof[n];
    if (d < 0) continue;
    double v = (*tags)[n] == NodeTag::DirichletOne ? 1.0 : 0.0;
    double& slot = fv[static_cast<std::size_t>(d)];
    if (!std::isnan(slot) && slot != v)
      throw SolveError("conflicting essential values on one degree of freedom");
    slot = v;
  }
  return fv;
}

// Absolute nodewise jump, linearly interpolated, 2-point Gauss; matches
// jump_energy with the per-edge weights spelled out.
double weighted_jump_value(const Field& u, const std::vector<double>& edge_w, double p) {
  const InterfaceMesh& m = *u.mesh;
  double total = 0.0;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    double w = e < edge_w.size() ? edge_w[e] : 0.0;
    if (w <= 0.0) continue;
    const InterfaceEdge& ed = m.edges[e];
    double j1 = std::abs(u.at_node(ed.p1) - u.at_node(ed.m1));
    double j2 = std::abs(u.at_node(ed.p2) - u.at_node(ed.m2));
    double acc = 0.0;
    for (double t : kGauss) acc += 0.5 * std::pow((1.0 - t) * j1 + t * j2, p);
    total += w * ed.len * acc;
  }
  return total;
}

double objective_value(const Field& u, const BulkConfig& bulk, const std::vector<double>& edge_w,
                       const LowerOrderConfig* low) {
  double v = bulk_energy(u, bulk) + weighted_jump_value(u, edge_w, bulk.p);
  if (low != nullptr) v += lower_order_energy(u, *low);
  return v;
}

// Value and dof gradient of the objective (gradient slots for fixed dofs
// are zeroed by the caller).
double objective_gradient(const Field& u, const BulkConfig& bulk,
                          const std::vector<double>& edge_w, const LowerOrderConfig* low,
                          Eigen::VectorXd& grad) {
  const InterfaceMesh& m = *u.mesh;
  const auto& nd = u.dofs.node_dof;
  grad.setZero(u.dofs.n_dofs);
  double value = 0.0;

  for (std::size_t tt = 0; tt < m.triangles.size(); ++tt) {
    if (!u.dofs.tri_active[tt]) continue;
    const TriIndex& t = m.triangles[tt];
    TriGeom g = tri_geom(m, t);
    const int vid[3] = {t.a, t.b, t.c};
    Vec2 gu = u.at_node(t.a) * g.g[0] + u.at_node(t.b) * g.g[1] + u.at_node(t.c) * g.g[2];
    value += g.area * bulk.f(gu);
    Vec2 dfv = bulk.df(gu);
    for (int k = 0; k < 3; ++k)
      grad[nd[static_cast<std::size_t>(vid[k])]] += g.area * dot(dfv, g.g[k]);
    if (low != nullptr) {
      for (int k = 0; k < 3; ++k) {
        int i = vid[k], j = vid[(k + 1) % 3];
        double v = 0.5 * (u.at_node(i) + u.at_node(j)) - h_mid(m, *low, i, j);
        value += g.area / 3.0 * std::pow(std::abs(v), low->q);
        double dv = low->q * std::pow(std::abs(v), low->q - 1.0) * sgn(v);
        grad[nd[static_cast<std::size_t>(i)]] += g.area / 6.0 * dv;
        grad[nd[static_cast<std::size_t>(j)]] += g.area / 6.0 * dv;
      }
    }
  }

  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    double w = e < edge_w.size() ? edge_w[e] : 0.0;
    if (w <= 0.0) continue;
    const InterfaceEdge& ed = m.edges[e];
    double d1 = u.at_node(ed.p1) - u.at_node(ed.m1);
    double d2 = u.at_node(ed.p2) - u.at_node(ed.m2);
    for (double t : kGauss) {
      double jv = (1.0 - t) * std::abs(d1) + t * std::abs(d2);
      value += w * ed.len * 0.5 * std::pow(jv, bulk.p);
      if (jv <= 0.0) continue;
      double factor = w * ed.len * 0.5 * bulk.p * std::pow(jv, bulk.p - 1.0);
      double c1 = factor * (1.0 - t) * sgn(d1);
      double c2 = factor * t * sgn(d2);
      grad[nd[static_cast<std::size_t>(ed.p1)]] += c1;
      grad[nd[static_cast<std::size_t>(ed.m1)]] -= c1;
      grad[nd[static_cast<std::size_t>(ed.p2)]] += c2;
      grad[nd[static_cast<std::size_t>(ed.m2)]] -= c2;
    }
  }
  return value;
}

SolveResult minimize(const InterfaceMesh& mesh, const DofMap& dofs,
                     const std::vector<double>& edge_w, const BulkConfig& bulk,
                     const LowerOrderConfig* low, const std::vector<NodeTag>* tags,
                     const Field* init, const SolverOptions& opts) {
  opts.validate();
  bulk.validate();
  if (low != nullptr) low->validate();

  SolveResult res;
  res.u.mesh = &mesh;
  res.u.dofs = dofs;
  res.u.coeffs = Eigen::VectorXd::Zero(dofs.n_dofs);
  if (init != nullptr) res.u.coeffs = init->coeffs;

  std::vector<double> fv = fixed_values(dofs, tags);
  for (int d = 0; d < dofs.n_dofs; ++d)
    if (!std::isnan(fv[static_cast<std::size_t>(d)])) res.u.coeffs[d] = fv[static_cast<std::size_t>(d)];

  std::vector<int> free_of(static_cast<std::size_t>(dofs.n_dofs), -1);
  int n_free = 0;
  for (int d = 0; d < dofs.n_dofs; ++d)
    if (std::isnan(fv[static_cast<std::size_t>(d)])) free_of[static_cast<std::size_t>(d)] = n_free++;

  bool quadratic = bulk.p == 2.0 && (low == nullptr || low->q == 2.0);
  res.stats.quadratic_path = quadratic;

  if (n_free == 0) {
    res.stats.converged = true;
    res.value = objective_value(res.u, bulk, edge_w, low);
    return res;
  }

  if (quadratic) {
    QuadModel qm = assemble_quadratic(mesh, dofs, edge_w, bulk, low);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    std::vector<Eigen::Triplet<double>> red;
    red.reserve(qm.trips.size());
    for (const auto& tr : qm.trips) {
      int fi = free_of[static_cast<std::size_t>(tr.row())];
      if (fi < 0) continue;
      int fj = free_of[static_cast<std::size_t>(tr.col())];
      if (fj >= 0)
        red.emplace_back(fi, fj, tr.value());
      else
        rhs[fi] -= tr.value() * fv[static_cast<std::size_t>(tr.col())];
    }
    for (int d = 0; d < dofs.n_dofs; ++d) {
      int fi = free_of[static_cast<std::size_t>(d)];
      if (fi >= 0) rhs[fi] += qm.b[d];
    }
    Eigen::SparseMatrix<double> Q(n_free, n_free);
    Q.setFromTriplets(red.begin(), red.end());

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opts.linear_tol);
    cg.setMaxIterations(opts.max_linear_iter);
    cg.compute(Q);
    Eigen::VectorXd x = cg.solve(rhs);
    res.stats.iterations = static_cast<int>(cg.iterations());
    res.stats.residual = cg.error();
    res.stats.converged = cg.info() == Eigen::Success;
    if (!res.stats.converged) throw SolveError("conjugate gradient iteration cap exceeded");
    for (int d = 0; d < dofs.n_dofs; ++d) {
      int fi = free_of[static_cast<std::size_t>(d)];
      if (fi >= 0) res.u.coeffs[d] = x[fi];
    }
    res.value = objective_value(res.u, bulk, edge_w, low);
    return res;
  }

  // Descent path: diagonal scaling from the p = q = 2 surrogate of the
  // same problem, Armijo backtracking, deterministic initialization.
  BulkConfig surrogate = bulk;
  surrogate.p = 2.0;
  LowerOrderConfig low2;
  if (low != nullptr) {
    low2 = *low;
    low2.q = 2.0;
  }
  QuadModel qm = assemble_quadratic(mesh, dofs, edge_w, surrogate, low != nullptr ? &low2 : nullptr);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dofs.n_dofs);
  for (const auto& tr : qm.trips)
    if (tr.row() == tr.col()) diag[tr.row()] += tr.value();
  for (int d = 0; d < dofs.n_dofs; ++d)
    if (diag[d] <= 0.0) diag[d] = 1.0;

  Eigen::VectorXd grad(dofs.n_dofs);
  double energy = objective_gradient(res.u, bulk, edge_w, low, grad);
  for (int d = 0; d < dofs.n_dofs; ++d)
    if (free_of[static_cast<std::size_t>(d)] < 0) grad[d] = 0.0;

  double step = 1.0;
  int it = 0;
  bool energy_settled = false;  // relative decrease below energy_stop
  for (; it < opts.max_descent_iter; ++it) {
    double gmax = grad.cwiseAbs().maxCoeff();
    res.stats.residual = gmax;
    if (gmax <= opts.grad_stop * (1.0 + std::abs(energy))) break;
    Eigen::VectorXd dir = -grad.cwiseQuotient(diag);
    double gd = grad.dot(dir);
    double t = std::min(step * 2.0, 1e6);
    Field trial = res.u;
    double e_try = 0.0;
    bool accepted = false;
    while (t >= 1e-18) {
      trial.coeffs = res.u.coeffs + t * dir;
      e_try = objective_value(trial, bulk, edge_w, low);
      if (e_try <= energy + opts.armijo_c * t * gd) {
        accepted = true;
        break;
      }
      t *= opts.backtrack;
    }
    if (!accepted) break;  // no admissible step at machine scale
    double decrease = energy - e_try;
    res.u.coeffs = trial.coeffs;
    step = t;
    energy = objective_gradient(res.u, bulk, edge_w, low, grad);
    for (int d = 0; d < dofs.n_dofs; ++d)
      if (free_of[static_cast<std::size_t>(d)] < 0) grad[d] = 0.0;
    if (decrease <= opts.energy_stop * (1.0 + std::abs(energy))) {
      energy_settled = true;
      break;
    }
  }
  // either stopping rule counts as convergence; an Armijo stall or the
  // iteration cap does not
  double gmax = grad.cwiseAbs().maxCoeff();
  res.stats.residual = gmax;
  res.stats.converged =
      energy_settled || gmax <= opts.grad_stop * (1.0 + std::abs(energy));
  res.stats.iterations = it;
  if (it >= opts.max_descent_iter && !res.stats.converged)
    throw SolveError("descent iteration cap exceeded");
  res.value = energy;
  return res;
}

std::vector<double> weights_from_pattern(const CouplingPattern& pat) {
  std::vector<double> w(pat.state.size(), 0.0);
  for (std::size_t e = 0; e < pat.state.size(); ++e)
    if (pat.state[e] == EdgeState::Penalized) w[e] = pat.theta[e];
  return w;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    double w = cross(p, q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (std::abs(a2) < 1e-300) throw GeometryError("degenerate polygon (zero area)");
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

double ray_radius(Vec2 c, Vec2 dir, const std::vector<Vec2>& poly) {
  double best = -1.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Vec2 a = poly[i];
    Vec2 eb = poly[(i + 1) % poly.size()] - a;
    double det = cross(eb, dir);
    if (std::abs(det) < 1e-14) continue;
    Vec2 rc = a - c;
    double t = cross(eb, rc) / det;
    double s = cross(dir, rc) / det;
    if (s >= -1e-12 && s <= 1.0 + 1e-12 && t > 1e-12) best = std::max(best, t);
  }
  if (best < 0.0) throw GeometryError("boundary not star shaped about the inner centroid");
  return best;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(linear_tol > 0.0) || !(energy_stop > 0.0) || !(grad_stop > 0.0))
    throw ConfigError("solver tolerances must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0) || !(backtrack > 0.0 && backtrack < 1.0))
    throw ConfigError("solver descent factors must lie in (0, 1)");
  if (max_linear_iter < 1 || max_descent_iter < 1)
    throw ConfigError("solver iteration caps must be at least 1");
}

CouplingPattern pattern_from_measure(const InterfaceMesh& mesh, const InterfaceMeasure& mu) {
  CouplingPattern pat;
  pat.state.resize(mesh.edges.size(), EdgeState::Tied);
  pat.theta.assign(mesh.edges.size(), 0.0);
  pat.removed.assign(mesh.triangles.size(), 0);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    double w = mu.weight_at((mesh.edges[e].s0 + mesh.edges[e].s1) / 2.0);
    if (std::isinf(w)) {
      pat.state[e] = EdgeState::Tied;
    } else if (w == 0.0) {
      pat.state[e] = EdgeState::Free;
    } else {
      pat.state[e] = EdgeState::Penalized;
      pat.theta[e] = w;
    }
  }
  return pat;
}

SolveResult solve_global(const InterfaceMesh& mesh, const CouplingPattern* pattern,
                         const InterfaceMeasure* mu, const BulkConfig& bulk,
                         const LowerOrderConfig& low, const SolverOptions& opts) {
  if ((pattern == nullptr) == (mu == nullptr))
    throw SolveError("solve_global takes exactly one of a coupling pattern or a measure");
  CouplingPattern derived;
  const CouplingPattern* pat = pattern;
  if (mu != nullptr) {
    derived = pattern_from_measure(mesh, *mu);
    pat = &derived;
  }
  DofMap dofs = build_dof_map(mesh, *pat);
  return minimize(mesh, dofs, weights_from_pattern(*pat), bulk, &low, nullptr, nullptr, opts);
}

SolveResult solve_cell(const CellMesh& cell, const CouplingPattern& coupling,
                       const BulkConfig& bulk, const SolverOptions& opts) {
  DofMap dofs = build_dof_map(cell.mesh, coupling);

  // Linear ramp between the mean Dirichlet-zero and Dirichlet-one points:
  // feasible, deterministic, exact for the flat tied strip.
  Field init;
  init.mesh = &cell.mesh;
  init.dofs = dofs;
  init.coeffs = Eigen::VectorXd::Zero(dofs.n_dofs);
  Vec2 lo{0, 0}, hi{0, 0};
  int nlo = 0, nhi = 0;
  for (std::size_t n = 0; n < cell.tags.size(); ++n) {
    if (cell.tags[n] == NodeTag::DirichletZero) {
      lo = lo + cell.mesh.nodes[n];
      ++nlo;
    } else if (cell.tags[n] == NodeTag::DirichletOne) {
      hi = hi + cell.mesh.nodes[n];
      ++nhi;
    }
  }
  if (nlo == 0 || nhi == 0) throw SolveError("cell mesh lacks essential boundary tags");
  lo = (1.0 / nlo) * lo;
  hi = (1.0 / nhi) * hi;
  Vec2 axis = hi - lo;
  double den = dot(axis, axis);
  for (std::size_t n = 0; n < cell.mesh.nodes.size(); ++n) {
    int d = dofs.node_dof[n];
    if (d < 0) continue;
    double r = dot(cell.mesh.nodes[n] - lo, axis) / den;
    init.coeffs[d] = std::clamp(r, 0.0, 1.0);
  }

  return minimize(cell.mesh, dofs, weights_from_pattern(coupling), bulk, nullptr, &cell.tags,
                  &init, opts);
}

SolveResult solve_cell(const CellMesh& cell, const InterfaceMeasure& coupling,
                       const BulkConfig& bulk, const SolverOptions& opts) {
  return solve_cell(cell, pattern_from_measure(cell.mesh, coupling), bulk, opts);
}

std::vector<Vec2> regular_ngon(Vec2 center, double radius, int n) {
  if (n < 3) throw GeometryError("regular polygon needs at least 3 vertices");
  std::vector<Vec2> poly(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double a = 2.0 * M_PI * k / n;
    poly[static_cast<std::size_t>(k)] = {center.x + radius * std::cos(a),
                                         center.y + radius * std::sin(a)};
  }
  return poly;
}

double capacity(const std::vector<Vec2>& outer, const std::vector<Vec2>& inner, double p,
                const CapacityOptions& opts) {
  if (inner.empty()) return 0.0;
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("capacity requires 1 < p <= 2");
  if (inner.size() < 3 || outer.size() < 3)
    throw GeometryError("capacity boundaries must be polygons");
  if (!(opts.h > 0.0)) throw ConfigError("capacity mesh size must be positive");

  Vec2 c = polygon_centroid(inner);

  std::vector<double> angles;
  auto add_angle = [&](Vec2 pnt) {
    double a = std::atan2(pnt.y - c.y, pnt.x - c.x);
    if (a < 0.0) a += 2.0 * M_PI;
    angles.push_back(a);
  };
  for (Vec2 v : inner) add_angle(v);
  for (Vec2 v : outer) add_angle(v);
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               angles.end());

  double r_out_max = 0.0;
  for (Vec2 v : outer) r_out_max = std::max(r_out_max, norm(v - c));
  double max_gap = opts.h / r_out_max;

  std::vector<double> stations;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    double a0 = angles[k];
    double a1 = k + 1 < angles.size() ? angles[k + 1] : angles[0] + 2.0 * M_PI;
    int parts = std::max(1, static_cast<int>(std::ceil((a1 - a0) / max_gap - 1e-9)));
    for (int i = 0; i < parts; ++i) stations.push_back(a0 + (a1 - a0) * i / parts);
  }

  int K = static_cast<int>(stations.size());
  std::vector<double> rin(static_cast<std::size_t>(K)), rout(static_cast<std::size_t>(K));
  double max_log_ratio = 0.0;
  for (int k = 0; k < K; ++k) {
    Vec2 dir{std::cos(stations[static_cast<std::size_t>(k)]),
             std::sin(stations[static_cast<std::size_t>(k)])};
    rin[static_cast<std::size_t>(k)] = ray_radius(c, dir, inner);
    rout[static_cast<std::size_t>(k)] = ray_radius(c, dir, outer);
    if (rin[static_cast<std::size_t>(k)] >= rout[static_cast<std::size_t>(k)] * (1.0 - 1e-9))
      throw GeometryError("inner set touches the outer boundary");
    max_log_ratio = std::max(
        max_log_ratio, std::log(rout[static_cast<std::size_t>(k)] / rin[static_cast<std::size_t>(k)]) *
                           rout[static_cast<std::size_t>(k)]);
  }
  int layers = std::max(1, static_cast<int>(std::ceil(max_log_ratio / opts.h)));

  InterfaceMesh m;
  m.target_h = opts.h;
  m.nodes.reserve(static_cast<std::size_t>(K) * (static_cast<std::size_t>(layers) + 1));
  std::vector<NodeTag> tags;
  auto idx = [&](int k, int i) { return k * (layers + 1) + i; };
  for (int k = 0; k < K; ++k) {
    Vec2 dir{std::cos(stations[static_cast<std::size_t>(k)]),
             std::sin(stations[static_cast<std::size_t>(k)])};
    double ratio = rout[static_cast<std::size_t>(k)] / rin[static_cast<std::size_t>(k)];
    for (int i = 0; i <= layers; ++i) {
      double r = rin[static_cast<std::size_t>(k)] * std::pow(ratio, static_cast<double>(i) / layers);
      m.nodes.push_back(c + r * dir);
      tags.push_back(i == 0 ? NodeTag::DirichletOne
                            : (i == layers ? NodeTag::DirichletZero : NodeTag::None));
    }
  }
  for (int k = 0; k < K; ++k) {
    int k1 = (k + 1) % K;
    for (int i = 0; i < layers; ++i) {
      // (r, theta) is the positively oriented polar frame, so the CCW cycle
      // runs radially first: (k,i) -> (k,i+1) -> (k1,i+1) -> (k1,i).
      m.triangles.push_back({idx(k, i), idx(k, i + 1), idx(k1, i + 1)});
      m.triangles.push_back({idx(k, i), idx(k1, i + 1), idx(k1, i)});
    }
  }
  for (const TriIndex& t : m.triangles) {
    double s2 = cross(m.nodes[static_cast<std::size_t>(t.b)] - m.nodes[static_cast<std::size_t>(t.a)],
                      m.nodes[static_cast<std::size_t>(t.c)] - m.nodes[static_cast<std::size_t>(t.a)]);
    if (!(s2 > 0.0)) throw MeshError("degenerate condenser cell (check star-shapedness)");
  }
  m.tri_side.assign(m.triangles.size(), 0);
  m.n_base_nodes = static_cast<int>(m.nodes.size());

  DofMap dofs;
  dofs.node_dof.resize(m.nodes.size());
  for (std::size_t n = 0; n < m.nodes.size(); ++n) dofs.node_dof[n] = static_cast<int>(n);
  dofs.tri_active.assign(m.triangles.size(), 1);
  dofs.n_dofs = static_cast<int>(m.nodes.size());

  BulkConfig bc;
  bc.p = p;
  SolveResult r = minimize(m, dofs, {}, bc, nullptr, &tags, nullptr, opts.solver);
  return r.value;
}

double capacity(const Domain& dom, const std::vector<Vec2>& inner, double p,
                const CapacityOptions& opts) {
  std::vector<Vec2> outer{{dom.xmin, dom.ymin}, {dom.xmax, dom.ymin},
                          {dom.xmax, dom.ymax}, {dom.xmin, dom.ymax}};
  return capacity(outer, inner, p, opts);
}

}  // namespace sievelab
