#include "sievelab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sievelab {

namespace {

constexpr double kRegEps = 1e-8;  // gradient regularization for 1 < p < 2

// 2-point Gauss nodes on [0, 1].
const double kGauss[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

struct TriGeom {
  double area;
  Vec2 g[3];  // barycentric gradients
};

TriGeom tri_geom(const InterfaceMesh& m, const TriIndex& t) {
  Vec2 p0 = m.nodes[static_cast<std::size_t>(t.a)];
  Vec2 p1 = m.nodes[static_cast<std::size_t>(t.b)];
  Vec2 p2 = m.nodes[static_cast<std::size_t>(t.c)];
  double s2 = cross(p1 - p0, p2 - p0);  // 2 * signed area, positive
  TriGeom g;
  g.area = s2 / 2.0;
  auto perp = [](Vec2 v) { return Vec2{-v.y, v.x}; };
  g.g[0] = (1.0 / s2) * perp(p2 - p1);
  g.g[1] = (1.0 / s2) * perp(p0 - p2);
  g.g[2] = (1.0 / s2) * perp(p1 - p0);
  return g;
}

double eig_min_max(const Eigen::Matrix2d& A, bool want_max) {
  double tr = A(0, 0) + A(1, 1);
  double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return want_max ? tr / 2.0 + disc : tr / 2.0 - disc;
}

double h_at_midpoint(const InterfaceMesh& m, const LowerOrderConfig& low, int i, int j) {
  if (!low.h_nodal.empty())
    return 0.5 * (low.h_nodal[static_cast<std::size_t>(i)] + low.h_nodal[static_cast<std::size_t>(j)]);
  Vec2 p = 0.5 * (m.nodes[static_cast<std::size_t>(i)] + m.nodes[static_cast<std::size_t>(j)]);
  return low.h(p.x, p.y);
}

bool edge_tied(const Field& u, const InterfaceEdge& e) {
  const auto& nd = u.dofs.node_dof;
  return nd[static_cast<std::size_t>(e.p1)] == nd[static_cast<std::size_t>(e.m1)] &&
         nd[static_cast<std::size_t>(e.p2)] == nd[static_cast<std::size_t>(e.m2)];
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double BulkConfig::lambda() const { return std::pow(eig_min_max(A, false), p / 2.0); }
double BulkConfig::Lambda() const { return std::pow(eig_min_max(A, true), p / 2.0); }

double BulkConfig::f(Vec2 xi) const {
  Eigen::Vector2d v(xi.x, xi.y);
  double quad = v.dot(A * v);
  return std::pow(quad, p / 2.0);
}

Vec2 BulkConfig::df(Vec2 xi) const {
  Eigen::Vector2d v(xi.x, xi.y);
  double quad = v.dot(A * v);
  double scale;
  if (p >= 2.0) {
    scale = quad == 0.0 ? 0.0 : p * std::pow(quad, p / 2.0 - 1.0);
  } else {
    scale = p * std::pow(kRegEps * kRegEps + quad, (p - 2.0) / 2.0);
  }
  Eigen::Vector2d g = scale * (A * v);
  return {g[0], g[1]};
}

void BulkConfig::validate() const {
  if (!(p > 1.0)) throw ConfigError("bulk.p must be greater than 1");
  if (std::abs(A(0, 1) - A(1, 0)) > 1e-12) throw ConfigError("bulk.A must be symmetric");
  if (!(eig_min_max(A, false) > 0.0)) throw ConfigError("bulk.A must be positive definite");
}

void LowerOrderConfig::validate() const {
  if (!(q >= 1.0)) throw ConfigError("lower.q must be at least 1");
  if (static_cast<bool>(h) == !h_nodal.empty())
    throw ConfigError("lower.h: exactly one of closed form or nodal datum required");
}

double InterfaceMeasure::weight_at(double s) const {
  for (const WeightedArc& a : pieces)
    if (s >= a.span.s0 && s <= a.span.s1) return a.weight;
  return default_weight;
}

void InterfaceMeasure::validate(double interface_length) const {
  auto check_weight = [](double w, const char* where) {
    if (std::isnan(w) || w < 0.0)
      throw ConfigError(strfmt("measure: %s weight must be 0, positive or inf", where));
  };
  check_weight(default_weight, "default");
  std::vector<WeightedArc> sorted = pieces;
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedArc& a, const WeightedArc& b) { return a.span.s0 < b.span.s0; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const WeightedArc& a = sorted[i];
    check_weight(a.weight, "piece");
    if (!(a.span.s1 > a.span.s0)) throw ConfigError("measure: empty arc interval");
    if (a.span.s0 < -1e-12 || a.span.s1 > interface_length + 1e-12)
      throw ConfigError("measure: arc interval outside [0, interface length]");
    if (i > 0 && a.span.s0 < sorted[i - 1].span.s1 - 1e-12)
      throw ConfigError("measure: overlapping arc intervals");
  }
}

double bulk_energy(const Field& u, const BulkConfig& bulk) {
  const InterfaceMesh& m = *u.mesh;
  double total = 0.0;
  for (std::size_t tt = 0; tt < m.triangles.size(); ++tt) {
    if (!u.dofs.tri_active[tt]) continue;
    const TriIndex& t = m.triangles[tt];
    TriGeom g = tri_geom(m, t);
    double ua = u.at_node(t.a), ub = u.at_node(t.b), uc = u.at_node(t.c);
    Vec2 grad = ua * g.g[0] + ub * g.g[1] + uc * g.g[2];
    total += g.area * bulk.f(grad);
  }
  return total;
}

std::optional<double> jump_energy(const Field& u, const InterfaceMeasure& mu, double p) {
  const InterfaceMesh& m = *u.mesh;
  double total = 0.0;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const InterfaceEdge& ed = m.edges[e];
    double w = mu.weight_at((ed.s0 + ed.s1) / 2.0);
    if (w == 0.0) continue;
    if (std::isinf(w)) {
      if (!edge_tied(u, ed)) return std::nullopt;  // INFEASIBLE
      continue;
    }
    double j1 = std::abs(u.at_node(ed.p1) - u.at_node(ed.m1));
    double j2 = std::abs(u.at_node(ed.p2) - u.at_node(ed.m2));
    double q = 0.0;
    for (double t : kGauss) q += 0.5 * std::pow((1.0 - t) * j1 + t * j2, p);
    total += w * ed.len * q;
  }
  return total;
}

double lower_order_energy(const Field& u, const LowerOrderConfig& low) {
  const InterfaceMesh& m = *u.mesh;
  double total = 0.0;
  for (std::size_t tt = 0; tt < m.triangles.size(); ++tt) {
    if (!u.dofs.tri_active[tt]) continue;
    const TriIndex& t = m.triangles[tt];
    TriGeom g = tri_geom(m, t);
    const int vid[3] = {t.a, t.b, t.c};
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      int i = vid[k], j = vid[(k + 1) % 3];
      double um = 0.5 * (u.at_node(i) + u.at_node(j));
      acc += std::pow(std::abs(um - h_at_midpoint(m, low, i, j)), low.q);
    }
    total += g.area / 3.0 * acc;
  }
  return total;
}

std::optional<EnergyGradient> total_energy_and_gradient(const Field& u, const BulkConfig& bulk,
                                                        const InterfaceMeasure* mu,
                                                        const LowerOrderConfig& low) {
  const InterfaceMesh& m = *u.mesh;
  EnergyGradient out;
  out.grad = Eigen::VectorXd::Zero(u.dofs.n_dofs);
  const auto& nd = u.dofs.node_dof;

  for (std::size_t tt = 0; tt < m.triangles.size(); ++tt) {
    if (!u.dofs.tri_active[tt]) continue;
    const TriIndex& t = m.triangles[tt];
    TriGeom g = tri_geom(m, t);
    const int vid[3] = {t.a, t.b, t.c};
    double uv[3] = {u.at_node(t.a), u.at_node(t.b), u.at_node(t.c)};
    Vec2 grad = uv[0] * g.g[0] + uv[1] * g.g[1] + uv[2] * g.g[2];
    out.value += g.area * bulk.f(grad);
    Vec2 dfv = bulk.df(grad);
    for (int k = 0; k < 3; ++k)
      out.grad[nd[static_cast<std::size_t>(vid[k])]] += g.area * dot(dfv, g.g[k]);

    for (int k = 0; k < 3; ++k) {
      int i = vid[k], j = vid[(k + 1) % 3];
      double um = 0.5 * (u.at_node(i) + u.at_node(j));
      double v = um - h_at_midpoint(m, low, i, j);
      out.value += g.area / 3.0 * std::pow(std::abs(v), low.q);
      double dv = low.q * std::pow(std::abs(v), low.q - 1.0) * sgn(v);
      out.grad[nd[static_cast<std::size_t>(i)]] += g.area / 3.0 * dv * 0.5;
      out.grad[nd[static_cast<std::size_t>(j)]] += g.area / 3.0 * dv * 0.5;
    }
  }

  if (mu != nullptr) {
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      const InterfaceEdge& ed = m.edges[e];
      double w = mu->weight_at((ed.s0 + ed.s1) / 2.0);
      if (w == 0.0) continue;
      if (std::isinf(w)) {
        if (!edge_tied(u, ed)) return std::nullopt;
        continue;
      }
      double d1 = u.at_node(ed.p1) - u.at_node(ed.m1);
      double d2 = u.at_node(ed.p2) - u.at_node(ed.m2);
      double j1 = std::abs(d1), j2 = std::abs(d2);
      for (double t : kGauss) {
        double jv = (1.0 - t) * j1 + t * j2;
        out.value += w * ed.len * 0.5 * std::pow(jv, bulk.p);
        if (jv <= 0.0) continue;
        double factor = w * ed.len * 0.5 * bulk.p * std::pow(jv, bulk.p - 1.0);
        double c1 = factor * (1.0 - t) * sgn(d1);
        double c2 = factor * t * sgn(d2);
        out.grad[nd[static_cast<std::size_t>(ed.p1)]] += c1;
        out.grad[nd[static_cast<std::size_t>(ed.m1)]] -= c1;
        out.grad[nd[static_cast<std::size_t>(ed.p2)]] += c2;
        out.grad[nd[static_cast<std::size_t>(ed.m2)]] -= c2;
      }
    }
  }
  return out;
}

double lq_distance(const Field& a, const Field& b, double q) {
  const InterfaceMesh& m = *a.mesh;
  double total = 0.0;
  for (std::size_t tt = 0; tt < m.triangles.size(); ++tt) {
    if (!a.dofs.tri_active[tt] || !b.dofs.tri_active[tt]) continue;
    const TriIndex& t = m.triangles[tt];
    TriGeom g = tri_geom(m, t);
    const int vid[3] = {t.a, t.b, t.c};
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      int i = vid[k], j = vid[(k + 1) % 3];
      double da = 0.5 * (a.at_node(i) + a.at_node(j));
      double db = 0.5 * (b.at_node(i) + b.at_node(j));
      acc += std::pow(std::abs(da - db), q);
    }
    total += g.area / 3.0 * acc;
  }
  return std::pow(total, 1.0 / q);
}

}  // namespace sievelab
