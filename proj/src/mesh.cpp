#include "sievelab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sievelab {

namespace {

double xi_of(Vec2 p, const Interface& itf) { return dot(p, itf.tangent); }
double eta_of(Vec2 p, const Interface& itf) { return dot(p, itf.normal); }

// Strictly increasing grid lines covering [lo, hi], containing every stop
// exactly, with spacing <= h in each section.
std::vector<double> make_axis(double lo, double hi, std::vector<double> stops, double h) {
  stops.push_back(lo);
  stops.push_back(hi);
  std::sort(stops.begin(), stops.end());
  std::vector<double> uniq;
  for (double s : stops) {
    if (s < lo - 1e-12 || s > hi + 1e-12) continue;
    if (uniq.empty() || s - uniq.back() > 1e-12) uniq.push_back(s);
  }
  std::vector<double> lines;
  lines.push_back(uniq.front());
  for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
    double a = uniq[k], b = uniq[k + 1];
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    for (int i = 1; i <= n; ++i) lines.push_back(i == n ? b : a + (b - a) * i / n);
  }
  return lines;
}

std::size_t index_of(const std::vector<double>& lines, double v) {
  auto it = std::min_element(lines.begin(), lines.end(),
                             [v](double a, double b) { return std::abs(a - v) < std::abs(b - v); });
  return static_cast<std::size_t>(it - lines.begin());
}

double longest_edge(const InterfaceMesh& m, const TriIndex& t) {
  auto& n = m.nodes;
  return std::max({norm(n[t.a] - n[t.b]), norm(n[t.b] - n[t.c]), norm(n[t.c] - n[t.a])});
}

void finalize_diameter(InterfaceMesh& m) {
  double d = 0.0;
  for (const TriIndex& t : m.triangles) d = std::max(d, longest_edge(m, t));
  m.max_diameter = d;
}

// Shared duplication step: grid row `row_c`, columns [ia, ib] are interface
// vertices; tips (single shared node) where `tip` is true. Re-points
// minus-side triangles to the copies and emits the edge records.
struct GridShape {
  int nx1 = 0;  // nodes per row
  int row_c = 0;
  int ia = 0, ib = 0;
  bool tip_a = false, tip_b = false;
};

void install_interface(InterfaceMesh& mesh, const Interface& itf, const GridShape& g,
                       const std::vector<double>& xi_lines, double xi_a) {
  mesh.n_base_nodes = static_cast<int>(mesh.nodes.size());
  std::vector<int> minus_id(static_cast<std::size_t>(g.ib - g.ia + 1));
  for (int i = g.ia; i <= g.ib; ++i) {
    int v = g.row_c * g.nx1 + i;
    bool tip = (i == g.ia && g.tip_a) || (i == g.ib && g.tip_b);
    if (tip) {
      minus_id[static_cast<std::size_t>(i - g.ia)] = v;
    } else {
      minus_id[static_cast<std::size_t>(i - g.ia)] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(mesh.nodes[static_cast<std::size_t>(v)]);
    }
  }

  auto is_interface_vertex = [&](int v) {
    int row = v / g.nx1, col = v % g.nx1;
    return row == g.row_c && col >= g.ia && col <= g.ib;
  };
  mesh.tri_side.assign(mesh.triangles.size(), 0);
  for (std::size_t tt = 0; tt < mesh.triangles.size(); ++tt) {
    TriIndex& t = mesh.triangles[tt];
    int* v[3] = {&t.a, &t.b, &t.c};
    int on_itf = 0;
    bool below = false;
    for (int k = 0; k < 3; ++k) {
      if (is_interface_vertex(*v[k]))
        ++on_itf;
      else if (*v[k] / g.nx1 < g.row_c)
        below = true;
    }
    if (on_itf == 0) continue;
    // two interface vertices means the triangle traverses an interface edge
    if (on_itf == 2) mesh.tri_side[tt] = below ? -1 : +1;
    if (below)
      for (int k = 0; k < 3; ++k)
        if (is_interface_vertex(*v[k])) *v[k] = minus_id[static_cast<std::size_t>(*v[k] % g.nx1 - g.ia)];
  }

  for (int i = g.ia; i < g.ib; ++i) {
    InterfaceEdge e;
    e.p1 = g.row_c * g.nx1 + i;
    e.p2 = g.row_c * g.nx1 + i + 1;
    e.m1 = minus_id[static_cast<std::size_t>(i - g.ia)];
    e.m2 = minus_id[static_cast<std::size_t>(i - g.ia + 1)];
    e.s0 = itf.arc_of_base(xi_lines[static_cast<std::size_t>(i)] - xi_a);
    e.s1 = itf.arc_of_base(xi_lines[static_cast<std::size_t>(i + 1)] - xi_a);
    e.len = norm(mesh.nodes[static_cast<std::size_t>(e.p1)] - mesh.nodes[static_cast<std::size_t>(e.p2)]);
    mesh.edges.push_back(e);
  }
}

}  // namespace

InterfaceMesh triangulate(const Domain& dom, const Interface& itf, double h) {
  dom.validate();
  if (!(h > 0.0)) throw MeshError("triangulate: h must be positive");
  const Vec2 t = itf.tangent, nu = itf.normal;
  const bool axis_ok = (std::abs(std::abs(t.x) - 1.0) < 1e-12 && std::abs(t.y) < 1e-12) ||
                       (std::abs(std::abs(t.y) - 1.0) < 1e-12 && std::abs(t.x) < 1e-12);
  if (!axis_ok)
    throw MeshError("triangulate: interface not representable at this resolution "
                    "(base segment must be axis-aligned)");

  const Vec2 corners[4] = {{dom.xmin, dom.ymin}, {dom.xmax, dom.ymin},
                           {dom.xmin, dom.ymax}, {dom.xmax, dom.ymax}};
  double xi0 = 1e300, xi1 = -1e300, eta0 = 1e300, eta1 = -1e300;
  for (Vec2 p : corners) {
    xi0 = std::min(xi0, xi_of(p, itf));
    xi1 = std::max(xi1, xi_of(p, itf));
    eta0 = std::min(eta0, eta_of(p, itf));
    eta1 = std::max(eta1, eta_of(p, itf));
  }
  double xia = xi_of(itf.a, itf), xib = xi_of(itf.b, itf);
  const double c = eta_of(itf.a, itf);
  const double tol = 1e-9 * std::max({dom.width(), dom.height(), 1.0});

  if (c <= eta0 + tol || c >= eta1 - tol)
    throw MeshError("triangulate: interface base line must be strictly inside the domain");
  if (xia < xi0 - tol || xib > xi1 + tol)
    throw MeshError("triangulate: interface extends outside the domain");
  const bool a_on_bdry = xia <= xi0 + tol;
  const bool b_on_bdry = xib >= xi1 - tol;
  if (!itf.test_mode && (a_on_bdry || b_on_bdry))
    throw MeshError("triangulate: interface endpoints on the boundary require test mode");
  const bool curved = !itf.flat();
  const double r0 = itf.half_width;
  if (curved && (c - r0 <= eta0 + tol || c + r0 >= eta1 - tol))
    throw MeshError("triangulate: curved interface requires the r0-cylinder inside the domain");
  if (a_on_bdry) xia = xi0;
  if (b_on_bdry) xib = xi1;

  const std::vector<double> xl = make_axis(xi0, xi1, {xia, xib}, h);
  const std::vector<double> el = make_axis(eta0, eta1, {c}, h);
  const int NX = static_cast<int>(xl.size()) - 1;
  const int NY = static_cast<int>(el.size()) - 1;

  InterfaceMesh mesh;
  mesh.target_h = h;
  mesh.nodes.resize(static_cast<std::size_t>((NX + 1) * (NY + 1)));
  auto blend = [&](double d) {
    double ad = std::abs(d);
    if (ad <= r0 / 2.0) return 1.0;
    if (ad >= r0) return 0.0;
    return (r0 - ad) / (r0 / 2.0);
  };
  for (int k = 0; k <= NY; ++k)
    for (int i = 0; i <= NX; ++i) {
      double xi = xl[static_cast<std::size_t>(i)];
      double eta = el[static_cast<std::size_t>(k)];
      if (curved) eta += blend(eta - c) * itf.profile_at_base(xi - xia);
      mesh.nodes[static_cast<std::size_t>(k * (NX + 1) + i)] = xi * t + eta * nu;
    }
  mesh.triangles.reserve(static_cast<std::size_t>(2 * NX * NY));
  for (int k = 0; k < NY; ++k)
    for (int i = 0; i < NX; ++i) {
      int n00 = k * (NX + 1) + i, n10 = n00 + 1;
      int n01 = n00 + NX + 1, n11 = n01 + 1;
      mesh.triangles.push_back({n00, n10, n11});
      mesh.triangles.push_back({n00, n11, n01});
    }

  GridShape g;
  g.nx1 = NX + 1;
  g.row_c = static_cast<int>(index_of(el, c));
  g.ia = static_cast<int>(index_of(xl, xia));
  g.ib = static_cast<int>(index_of(xl, xib));
  g.tip_a = !a_on_bdry;
  g.tip_b = !b_on_bdry;
  install_interface(mesh, itf, g, xl, xia);
  finalize_diameter(mesh);
  return mesh;
}

CouplingPattern all_tied(const InterfaceMesh& mesh) {
  CouplingPattern p;
  p.state.assign(mesh.edges.size(), EdgeState::Tied);
  p.theta.assign(mesh.edges.size(), 0.0);
  p.removed.assign(mesh.triangles.size(), 0);
  return p;
}

CouplingPattern apply_sieve(const InterfaceMesh& mesh, const CompactSet& k) {
  CouplingPattern pat = all_tied(mesh);
  if (k.kind == CompactSet::Kind::CrackSubset) {
    if (k.intervals.empty() || mesh.edges.empty()) return pat;  // empty sieve: fully tied
    // the mesh may cover only part of the interface (strip cells); the
    // pattern realizes K intersected with the covered arc range
    const double s_lo = mesh.edges.front().s0, s_hi = mesh.edges.back().s1;
    std::vector<ArcInterval> clipped;
    for (const ArcInterval& iv : k.intervals) {
      ArcInterval cv{std::max(iv.s0, s_lo), std::min(iv.s1, s_hi)};
      if (cv.s1 - cv.s0 > 1e-12) clipped.push_back(cv);
    }
    if (clipped.empty()) return pat;
    std::vector<double> vs;
    vs.reserve(mesh.edges.size() + 1);
    vs.push_back(mesh.edges.front().s0);
    for (const InterfaceEdge& e : mesh.edges) vs.push_back(e.s1);
    auto snap = [&](double s) {
      std::size_t i = index_of(vs, s);
      return vs[i];
    };
    std::vector<ArcInterval> snapped;
    double max_disp = 0.0;
    for (const ArcInterval& iv : clipped) {
      ArcInterval sv{snap(iv.s0), snap(iv.s1)};
      max_disp = std::max({max_disp, std::abs(sv.s0 - iv.s0), std::abs(sv.s1 - iv.s1)});
      snapped.push_back(sv);
    }
    pat.max_snap_displacement = max_disp;
    if (max_disp > mesh.target_h / 2.0 + 1e-12)
      throw MeshError(strfmt("apply_sieve: snapping displacement %g exceeds h/2 = %g",
                             max_disp, mesh.target_h / 2.0));
    for (std::size_t i = 0; i < snapped.size(); ++i) {
      if (!(snapped[i].s1 > snapped[i].s0 + 1e-12))
        throw MeshError("apply_sieve: wall interval collapsed at this resolution");
      if (i > 0 && !(snapped[i].s0 > snapped[i - 1].s1 + 1e-12))
        throw MeshError("apply_sieve: gap collapsed at this resolution (gap narrower than h)");
    }
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
      double mid = (mesh.edges[e].s0 + mesh.edges[e].s1) / 2.0;
      for (const ArcInterval& iv : snapped)
        if (mid > iv.s0 && mid < iv.s1) {
          pat.state[e] = EdgeState::Free;
          break;
        }
    }
  } else {
    for (std::size_t tt = 0; tt < mesh.triangles.size(); ++tt) {
      const TriIndex& t = mesh.triangles[tt];
      Vec2 cen = (1.0 / 3.0) * (mesh.nodes[static_cast<std::size_t>(t.a)] +
                                mesh.nodes[static_cast<std::size_t>(t.b)] +
                                mesh.nodes[static_cast<std::size_t>(t.c)]);
      for (const auto& poly : k.polygons)
        if (point_in_polygon(cen, poly)) {
          pat.removed[tt] = 1;
          break;
        }
    }
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
      Vec2 mid = 0.5 * (mesh.nodes[static_cast<std::size_t>(mesh.edges[e].p1)] +
                        mesh.nodes[static_cast<std::size_t>(mesh.edges[e].p2)]);
      for (const auto& poly : k.polygons)
        if (point_in_polygon(mid, poly)) {
          pat.state[e] = EdgeState::Free;
          break;
        }
    }
  }
  return pat;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller id as root (deterministic)
    parent[static_cast<std::size_t>(b)] = a;
  }
};

}  // namespace

DofMap build_dof_map(const InterfaceMesh& mesh, const CouplingPattern& pattern) {
  UnionFind uf(mesh.nodes.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e)
    if (pattern.state[e] == EdgeState::Tied) {
      uf.unite(mesh.edges[e].p1, mesh.edges[e].m1);
      uf.unite(mesh.edges[e].p2, mesh.edges[e].m2);
    }
  DofMap dm;
  dm.tri_active.assign(mesh.triangles.size(), 0);
  std::vector<std::uint8_t> class_active(mesh.nodes.size(), 0);
  for (std::size_t tt = 0; tt < mesh.triangles.size(); ++tt) {
    if (!pattern.removed.empty() && pattern.removed[tt]) continue;
    dm.tri_active[tt] = 1;
    const TriIndex& t = mesh.triangles[tt];
    class_active[static_cast<std::size_t>(uf.find(t.a))] = 1;
    class_active[static_cast<std::size_t>(uf.find(t.b))] = 1;
    class_active[static_cast<std::size_t>(uf.find(t.c))] = 1;
  }
  std::vector<int> root_dof(mesh.nodes.size(), -1);
  int next = 0;
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
    if (uf.find(static_cast<int>(v)) == static_cast<int>(v) && class_active[v]) root_dof[v] = next++;
  dm.n_dofs = next;
  dm.node_dof.assign(mesh.nodes.size(), -1);
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
    dm.node_dof[v] = root_dof[static_cast<std::size_t>(uf.find(static_cast<int>(v)))];
  return dm;
}

Field make_field(const InterfaceMesh& mesh, const CouplingPattern& pattern) {
  Field f;
  f.mesh = &mesh;
  f.dofs = build_dof_map(mesh, pattern);
  f.coeffs = Eigen::VectorXd::Zero(f.dofs.n_dofs);
  return f;
}

Field clamped(const Field& u, double t) {
  if (!(t >= 0.0)) throw SolveError("clamped: truncation level must be nonnegative");
  Field v = u;
  for (Eigen::Index i = 0; i < v.coeffs.size(); ++i)
    v.coeffs[i] = std::clamp(v.coeffs[i], -t, t);
  return v;
}

std::vector<EdgeJump> jump_of(const Field& u) {
  std::vector<EdgeJump> out(u.mesh->edges.size());
  for (std::size_t e = 0; e < u.mesh->edges.size(); ++e) {
    const InterfaceEdge& ed = u.mesh->edges[e];
    out[e].j1 = std::abs(u.at_node(ed.p1) - u.at_node(ed.m1));
    out[e].j2 = std::abs(u.at_node(ed.p2) - u.at_node(ed.m2));
  }
  return out;
}

CellMesh restrict_to_strip(const InterfaceMesh& mesh, const Interface& itf,
                           const StripRegion& region) {
  const double rho = region.rho;
  const double xia = xi_of(itf.a, itf);
  const double c = eta_of(itf.a, itf);
  const double tol = 1e-9 * std::max(1.0, itf.half_width);

  std::vector<double> off(mesh.nodes.size());
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    Vec2 p = mesh.nodes[v];
    off[v] = eta_of(p, itf) - c - itf.profile_at_base(xi_of(p, itf) - xia);
  }

  std::vector<int> keep_tri;
  for (std::size_t tt = 0; tt < mesh.triangles.size(); ++tt) {
    const TriIndex& t = mesh.triangles[tt];
    if (std::abs(off[static_cast<std::size_t>(t.a)]) > rho + tol ||
        std::abs(off[static_cast<std::size_t>(t.b)]) > rho + tol ||
        std::abs(off[static_cast<std::size_t>(t.c)]) > rho + tol)
      continue;
    Vec2 cen = (1.0 / 3.0) * (mesh.nodes[static_cast<std::size_t>(t.a)] +
                              mesh.nodes[static_cast<std::size_t>(t.b)] +
                              mesh.nodes[static_cast<std::size_t>(t.c)]);
    if (!point_in_polygon(cen, region.polygon)) continue;
    keep_tri.push_back(static_cast<int>(tt));
  }
  if (keep_tri.empty())
    throw MeshError("restrict_to_strip: empty submesh (strip thinner than one element row?)");

  std::vector<int> remap(mesh.nodes.size(), -1);
  CellMesh cell;
  cell.rho = rho;
  for (int tt : keep_tri) {
    const TriIndex& t = mesh.triangles[static_cast<std::size_t>(tt)];
    for (int v : {t.a, t.b, t.c})
      if (remap[static_cast<std::size_t>(v)] < 0) remap[static_cast<std::size_t>(v)] = 0;
  }
  int next = 0;
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
    if (remap[v] == 0) {
      remap[v] = next++;
      cell.mesh.nodes.push_back(mesh.nodes[v]);
      cell.parent_node.push_back(static_cast<int>(v));
    }
  for (int tt : keep_tri) {
    const TriIndex& t = mesh.triangles[static_cast<std::size_t>(tt)];
    cell.mesh.triangles.push_back({remap[static_cast<std::size_t>(t.a)],
                                   remap[static_cast<std::size_t>(t.b)],
                                   remap[static_cast<std::size_t>(t.c)]});
    cell.mesh.tri_side.push_back(mesh.tri_side.empty() ? 0 : mesh.tri_side[static_cast<std::size_t>(tt)]);
  }
  for (const InterfaceEdge& e : mesh.edges) {
    if (remap[static_cast<std::size_t>(e.p1)] < 0 || remap[static_cast<std::size_t>(e.p2)] < 0 ||
        remap[static_cast<std::size_t>(e.m1)] < 0 || remap[static_cast<std::size_t>(e.m2)] < 0)
      continue;
    InterfaceEdge ne = e;
    ne.p1 = remap[static_cast<std::size_t>(e.p1)];
    ne.p2 = remap[static_cast<std::size_t>(e.p2)];
    ne.m1 = remap[static_cast<std::size_t>(e.m1)];
    ne.m2 = remap[static_cast<std::size_t>(e.m2)];
    cell.mesh.edges.push_back(ne);
    cell.interface_length += ne.len;
  }
  cell.mesh.target_h = mesh.target_h;
  finalize_diameter(cell.mesh);

  int pairs = 0;
  for (const InterfaceEdge& e : cell.mesh.edges) pairs += (e.p2 != e.m2) ? 1 : 0;
  cell.mesh.n_base_nodes = static_cast<int>(cell.mesh.nodes.size());  // informational

  cell.tags.assign(cell.mesh.nodes.size(), NodeTag::None);
  int n_one = 0, n_zero = 0;
  for (std::size_t v = 0; v < cell.mesh.nodes.size(); ++v) {
    double o = off[static_cast<std::size_t>(cell.parent_node[v])];
    if (std::abs(o - rho) <= tol) {
      cell.tags[v] = NodeTag::DirichletOne;
      ++n_one;
    } else if (std::abs(o + rho) <= tol) {
      cell.tags[v] = NodeTag::DirichletZero;
      ++n_zero;
    }
  }
  if (n_one == 0 || n_zero == 0)
    throw MeshError("restrict_to_strip: strip offsets not resolvable at mesh resolution");
  (void)pairs;
  return cell;
}

CellMesh build_strip_mesh(const Interface& itf, ArcInterval window, double rho,
                          double h_along, int rows) {
  if (!(rho > 0.0) || !(rho < itf.half_width / 2.0))
    throw MeshError(strfmt("build_strip_mesh: rho=%g out of (0, r0/2)", rho));
  if (!(h_along > 0.0) || rows < 1) throw MeshError("build_strip_mesh: bad resolution parameters");
  if (!(window.s1 > window.s0) || window.s0 < -1e-12 || window.s1 > itf.length() + 1e-12)
    throw MeshError("build_strip_mesh: window outside the interface");

  // Invert the arc-length table to base coordinates.
  auto base_of_arc = [&](double s) {
    const auto& al = itf.arclen;
    s = std::clamp(s, 0.0, al.back());
    auto it = std::upper_bound(al.begin(), al.end(), s);
    std::size_t k = std::min<std::size_t>(al.size() - 2, it == al.begin() ? 0 : (it - al.begin() - 1));
    double ds = al[k + 1] - al[k];
    double t = ds > 0.0 ? (s - al[k]) / ds : 0.0;
    double step = 2.0 * itf.half_width / static_cast<double>(al.size() - 1);
    return (static_cast<double>(k) + t) * step;
  };
  const double b0 = base_of_arc(window.s0), b1 = base_of_arc(window.s1);
  const int NC = std::max(1, static_cast<int>(std::ceil((b1 - b0) / h_along - 1e-9)));
  const int NR = 2 * rows;
  const double dr = rho / static_cast<double>(rows);

  CellMesh cell;
  cell.rho = rho;
  InterfaceMesh& m = cell.mesh;
  m.target_h = h_along;
  std::vector<double> xl(static_cast<std::size_t>(NC + 1));
  for (int i = 0; i <= NC; ++i)
    xl[static_cast<std::size_t>(i)] = (i == NC) ? b1 : b0 + (b1 - b0) * i / NC;

  m.nodes.resize(static_cast<std::size_t>((NC + 1) * (NR + 1)));
  for (int k = 0; k <= NR; ++k)
    for (int i = 0; i <= NC; ++i) {
      double beta = xl[static_cast<std::size_t>(i)];
      double r = -rho + dr * k;
      m.nodes[static_cast<std::size_t>(k * (NC + 1) + i)] =
          itf.a + beta * itf.tangent + (itf.profile_at_base(beta) + r) * itf.normal;
    }
  for (int k = 0; k < NR; ++k)
    for (int i = 0; i < NC; ++i) {
      int n00 = k * (NC + 1) + i, n10 = n00 + 1;
      int n01 = n00 + NC + 1, n11 = n01 + 1;
      m.triangles.push_back({n00, n10, n11});
      m.triangles.push_back({n00, n11, n01});
    }

  // The interface continues laterally beyond the window, so every vertex of
  // the interface row is duplicated (no tips).
  {
    InterfaceMesh& mesh = m;
    mesh.n_base_nodes = static_cast<int>(mesh.nodes.size());
    std::vector<int> minus_id(static_cast<std::size_t>(NC + 1));
    for (int i = 0; i <= NC; ++i) {
      int v = rows * (NC + 1) + i;
      minus_id[static_cast<std::size_t>(i)] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(mesh.nodes[static_cast<std::size_t>(v)]);
    }
    mesh.tri_side.assign(mesh.triangles.size(), 0);
    for (std::size_t tt = 0; tt < mesh.triangles.size(); ++tt) {
      TriIndex& t = mesh.triangles[tt];
      int* v[3] = {&t.a, &t.b, &t.c};
      int on_itf = 0;
      bool below = false;
      for (int kk = 0; kk < 3; ++kk) {
        int row = *v[kk] / (NC + 1);
        if (row == rows)
          ++on_itf;
        else if (row < rows)
          below = true;
      }
      if (on_itf == 0) continue;
      if (on_itf == 2) mesh.tri_side[tt] = below ? -1 : +1;
      if (below)
        for (int kk = 0; kk < 3; ++kk)
          if (*v[kk] / (NC + 1) == rows)
            *v[kk] = minus_id[static_cast<std::size_t>(*v[kk] % (NC + 1))];
    }
    for (int i = 0; i < NC; ++i) {
      InterfaceEdge e;
      e.p1 = rows * (NC + 1) + i;
      e.p2 = rows * (NC + 1) + i + 1;
      e.m1 = minus_id[static_cast<std::size_t>(i)];
      e.m2 = minus_id[static_cast<std::size_t>(i + 1)];
      e.s0 = itf.arc_of_base(xl[static_cast<std::size_t>(i)]);
      e.s1 = itf.arc_of_base(xl[static_cast<std::size_t>(i + 1)]);
      e.len = norm(mesh.nodes[static_cast<std::size_t>(e.p1)] - mesh.nodes[static_cast<std::size_t>(e.p2)]);
      mesh.edges.push_back(e);
      cell.interface_length += e.len;
    }
  }
  finalize_diameter(m);

  cell.tags.assign(m.nodes.size(), NodeTag::None);
  for (int i = 0; i <= NC; ++i) {
    cell.tags[static_cast<std::size_t>(NR * (NC + 1) + i)] = NodeTag::DirichletOne;
    cell.tags[static_cast<std::size_t>(i)] = NodeTag::DirichletZero;
  }
  return cell;
}

}  // namespace sievelab
