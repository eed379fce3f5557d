#include "sievelab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "sievelab/util.hpp"

namespace sievelab {

namespace {

std::string state_token(EdgeState s, double theta) {
  switch (s) {
    case EdgeState::Tied:
      return "tied";
    case EdgeState::Free:
      return "free";
    case EdgeState::Penalized:
      return "pen:" + fmt_g17(theta);
  }
  throw IoError("unknown edge state");
}

// Line-oriented tokenizer that tracks the 1-based line number for errors.
struct Reader {
  std::vector<std::string> lines;
  std::size_t next = 0;

  explicit Reader(const std::string& text) {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  bool done() const { return next >= lines.size(); }

  std::vector<std::string> tokens() {
    if (done()) throw IoError("unexpected end of file");
    std::istringstream is(lines[next]);
    ++next;
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(strfmt("line %zu: %s", next, what.c_str()));
  }
};

long to_int(Reader& r, const std::string& tok) {
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') r.fail("expected integer, got '" + tok + "'");
  return v;
}

double to_double(Reader& r, const std::string& tok) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') r.fail("expected number, got '" + tok + "'");
  return v;
}

// Directed edge (a,b) appears in the CCW cycle of t.
bool has_directed(const TriIndex& t, int a, int b) {
  return (t.a == a && t.b == b) || (t.b == a && t.c == b) || (t.c == a && t.a == b);
}

// tri_side, n_base_nodes and max_diameter are functions of the persisted
// data: plus-side triangles traverse an interface edge in the +s direction,
// minus-side ones against it, and minus copies are exactly the m-nodes that
// differ from their p partner.
void rebuild_derived(InterfaceMesh& m) {
  double d = 0.0;
  for (const TriIndex& t : m.triangles) {
    d = std::max({d, norm(m.nodes[static_cast<std::size_t>(t.a)] - m.nodes[static_cast<std::size_t>(t.b)]),
                  norm(m.nodes[static_cast<std::size_t>(t.b)] - m.nodes[static_cast<std::size_t>(t.c)]),
                  norm(m.nodes[static_cast<std::size_t>(t.c)] - m.nodes[static_cast<std::size_t>(t.a)])});
  }
  m.max_diameter = d;

  std::set<int> copies;
  for (const InterfaceEdge& e : m.edges) {
    if (e.m1 != e.p1) copies.insert(e.m1);
    if (e.m2 != e.p2) copies.insert(e.m2);
  }
  m.n_base_nodes = static_cast<int>(m.nodes.size()) - static_cast<int>(copies.size());

  m.tri_side.assign(m.triangles.size(), 0);
  for (std::size_t tt = 0; tt < m.triangles.size(); ++tt) {
    const TriIndex& t = m.triangles[tt];
    for (const InterfaceEdge& e : m.edges) {
      if (has_directed(t, e.p1, e.p2)) {
        m.tri_side[tt] = +1;
        break;
      }
      if (has_directed(t, e.m2, e.m1)) {
        m.tri_side[tt] = -1;
        break;
      }
    }
  }
}

}  // namespace

std::string mesh_text(const InterfaceMesh& mesh, const CouplingPattern* pattern) {
  if (pattern && pattern->state.size() != mesh.edges.size())
    throw IoError("mesh_text: pattern does not match the mesh edge count");
  std::string out;
  out += strfmt("nodes %zu triangles %zu edges %zu h %s\n", mesh.nodes.size(),
                mesh.triangles.size(), mesh.edges.size(), fmt_g17(mesh.target_h).c_str());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    out += strfmt("%zu %s %s\n", i, fmt_g17(mesh.nodes[i].x).c_str(), fmt_g17(mesh.nodes[i].y).c_str());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const TriIndex& t = mesh.triangles[i];
    out += strfmt("%zu %d %d %d\n", i, t.a, t.b, t.c);
  }
  for (std::size_t i = 0; i < mesh.edges.size(); ++i) {
    const InterfaceEdge& e = mesh.edges[i];
    std::string st = pattern ? state_token(pattern->state[i],
                                           i < pattern->theta.size() ? pattern->theta[i] : 0.0)
                             : "tied";
    out += strfmt("%zu %d %d %d %d %s %s %s %s\n", i, e.p1, e.p2, e.m1, e.m2,
                  fmt_g17(e.s0).c_str(), fmt_g17(e.s1).c_str(), fmt_g17(e.len).c_str(), st.c_str());
  }
  return out;
}

std::string field_text(const NamedField& field) {
  if (field.name.empty() || field.name.find_first_of(" \t\n") != std::string::npos)
    throw IoError("field name must be a nonempty single token");
  std::string out = strfmt("field %s %zu\n", field.name.c_str(), field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i)
    out += strfmt("%zu %s\n", i, fmt_g17(field.values[i]).c_str());
  return out;
}

std::string bundle_text(const MeshBundle& bundle) {
  std::string out = mesh_text(bundle.mesh, &bundle.pattern);
  for (const NamedField& f : bundle.fields) out += field_text(f);
  return out;
}

MeshBundle parse_bundle(const std::string& text) {
  Reader r(text);
  auto head = r.tokens();
  if (head.size() != 8 || head[0] != "nodes" || head[2] != "triangles" || head[4] != "edges" ||
      head[6] != "h")
    r.fail("expected header 'nodes N triangles T edges E h <value>'");
  long nn = to_int(r, head[1]), nt = to_int(r, head[3]), ne = to_int(r, head[5]);
  if (nn < 0 || nt < 0 || ne < 0) r.fail("negative count in header");

  MeshBundle b;
  b.mesh.target_h = to_double(r, head[7]);
  b.mesh.nodes.resize(static_cast<std::size_t>(nn));
  for (long i = 0; i < nn; ++i) {
    auto t = r.tokens();
    if (t.size() != 3) r.fail("expected 'id x y'");
    if (to_int(r, t[0]) != i) r.fail(strfmt("node ids must be 0..N-1 in order (expected %ld)", i));
    b.mesh.nodes[static_cast<std::size_t>(i)] = {to_double(r, t[1]), to_double(r, t[2])};
  }
  b.mesh.triangles.resize(static_cast<std::size_t>(nt));
  for (long i = 0; i < nt; ++i) {
    auto t = r.tokens();
    if (t.size() != 4) r.fail("expected 'id n1 n2 n3'");
    if (to_int(r, t[0]) != i) r.fail(strfmt("triangle ids must be 0..T-1 in order (expected %ld)", i));
    TriIndex& tri = b.mesh.triangles[static_cast<std::size_t>(i)];
    tri.a = static_cast<int>(to_int(r, t[1]));
    tri.b = static_cast<int>(to_int(r, t[2]));
    tri.c = static_cast<int>(to_int(r, t[3]));
    for (int v : {tri.a, tri.b, tri.c})
      if (v < 0 || v >= nn) r.fail("triangle node id out of range");
  }
  b.mesh.edges.resize(static_cast<std::size_t>(ne));
  b.pattern.state.resize(static_cast<std::size_t>(ne), EdgeState::Tied);
  b.pattern.theta.assign(static_cast<std::size_t>(ne), 0.0);
  b.pattern.removed.assign(static_cast<std::size_t>(nt), 0);
  for (long i = 0; i < ne; ++i) {
    auto t = r.tokens();
    if (t.size() != 9) r.fail("expected 'id p1 p2 m1 m2 s0 s1 len state'");
    if (to_int(r, t[0]) != i) r.fail(strfmt("edge ids must be 0..E-1 in order (expected %ld)", i));
    InterfaceEdge& e = b.mesh.edges[static_cast<std::size_t>(i)];
    e.p1 = static_cast<int>(to_int(r, t[1]));
    e.p2 = static_cast<int>(to_int(r, t[2]));
    e.m1 = static_cast<int>(to_int(r, t[3]));
    e.m2 = static_cast<int>(to_int(r, t[4]));
    for (int v : {e.p1, e.p2, e.m1, e.m2})
      if (v < 0 || v >= nn) r.fail("edge node id out of range");
    e.s0 = to_double(r, t[5]);
    e.s1 = to_double(r, t[6]);
    e.len = to_double(r, t[7]);
    const std::string& st = t[8];
    if (st == "tied") {
      b.pattern.state[static_cast<std::size_t>(i)] = EdgeState::Tied;
    } else if (st == "free") {
      b.pattern.state[static_cast<std::size_t>(i)] = EdgeState::Free;
    } else if (st.rfind("pen:", 0) == 0) {
      double th = to_double(r, st.substr(4));
      if (!(th > 0.0) || !std::isfinite(th)) r.fail("penalized edge weight must be finite positive");
      b.pattern.state[static_cast<std::size_t>(i)] = EdgeState::Penalized;
      b.pattern.theta[static_cast<std::size_t>(i)] = th;
    } else {
      r.fail("unknown edge state '" + st + "'");
    }
  }

  while (!r.done()) {
    auto t = r.tokens();
    if (t.empty()) continue;  // tolerate trailing blank lines
    if (t.size() != 3 || t[0] != "field") r.fail("expected 'field <name> N'");
    NamedField f;
    f.name = t[1];
    long fn = to_int(r, t[2]);
    if (fn < 0) r.fail("negative field length");
    f.values.resize(static_cast<std::size_t>(fn));
    for (long i = 0; i < fn; ++i) {
      auto v = r.tokens();
      if (v.size() != 2) r.fail("expected 'id value'");
      if (to_int(r, v[0]) != i) r.fail(strfmt("field ids must be 0..N-1 in order (expected %ld)", i));
      f.values[static_cast<std::size_t>(i)] = to_double(r, v[1]);
    }
    b.fields.push_back(std::move(f));
  }

  rebuild_derived(b.mesh);
  return b;
}

namespace {

// NaN cells print as `nan`, saturated estimates as `inf`; both parse back
// with strtod.
std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt_g17(v);
}

}  // namespace

std::string cell_table_csv(const std::vector<CellTable>& tables) {
  std::string out = "window,rho,j,m,per_length\n";
  for (const CellTable& t : tables) {
    std::string window = fmt_g17(t.window.s0) + ":" + fmt_g17(t.window.s1);
    for (std::size_t r = 0; r < t.rhos.size(); ++r)
      for (std::size_t c = 0; c < t.js.size(); ++c) {
        const CellEntry& e = t.values[r][c];
        out += strfmt("%s,%s,%d,%s,%s\n", window.c_str(), fmt_g17(t.rhos[r]).c_str(), t.js[c],
                      csv_num(e.m).c_str(), csv_num(e.per_length).c_str());
      }
  }
  return out;
}

std::string report_csv(const ConvergenceReport& report) {
  std::string out = "j,min_value,lq_distance,energy_gap\n";
  for (const JRecord& rec : report.per_j)
    out += strfmt("%d,%s,%s,%s\n", rec.j, csv_num(rec.min_value).c_str(),
                  csv_num(rec.lq_distance).c_str(), csv_num(rec.energy_gap).c_str());
  return out;
}

std::string theta_csv(const ReconstructedDensity& density) {
  std::string out = "window_start,window_end,theta_hat,spread\n";
  for (const WindowEstimate& w : density.windows)
    out += strfmt("%s,%s,%s,%s\n", fmt_g17(w.window.s0).c_str(), fmt_g17(w.window.s1).c_str(),
                  csv_num(w.theta_hat).c_str(), csv_num(w.spread).c_str());
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace sievelab
