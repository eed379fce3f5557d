#include "sievelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sievelab/expr.hpp"
#include "sievelab/io.hpp"
#include "sievelab/util.hpp"

namespace sievelab {

using nlohmann::json;

RunMode mode_from_string(const std::string& name) {
  if (name == "perforated") return RunMode::Perforated;
  if (name == "transmission") return RunMode::Transmission;
  if (name == "cell") return RunMode::Cell;
  if (name == "reconstruct") return RunMode::Reconstruct;
  if (name == "gamma") return RunMode::Gamma;
  if (name == "capacity") return RunMode::Capacity;
  if (name == "monotone") return RunMode::Monotone;
  throw ConfigError("run.mode: unknown mode '" + name +
                    "' (expected perforated, transmission, cell, reconstruct, gamma, capacity "
                    "or monotone)");
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Perforated: return "perforated";
    case RunMode::Transmission: return "transmission";
    case RunMode::Cell: return "cell";
    case RunMode::Reconstruct: return "reconstruct";
    case RunMode::Gamma: return "gamma";
    case RunMode::Capacity: return "capacity";
    case RunMode::Monotone: return "monotone";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Parser state: collects unknown keys so one error can list all of them.
struct Parser {
  std::vector<std::string> unknown;

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : allowed)
        if (it.key() == k) {
          ok = true;
          break;
        }
      if (!ok) unknown.push_back(path.empty() ? it.key() : path + "." + it.key());
    }
  }
};

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& need(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required key: " + path + key);
  return *it;
}

const json* maybe(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_num(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) bad(path, "expected a finite number");
  return d;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::string as_str(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

Vec2 as_vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) bad(path, "expected [x, y]");
  return {as_num(v[0], path + "[0]"), as_num(v[1], path + "[1]")};
}

// 0, "inf", or a positive float.
double as_weight(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInf;
    bad(path, "expected 0, \"inf\" or a positive number");
  }
  double w = as_num(v, path);
  if (w < 0.0) bad(path, "weight must be nonnegative");
  return w;
}

json weight_json(double w) { return std::isinf(w) ? json("inf") : json(w); }

DecayLaw parse_law(Parser& P, const json& v, const std::string& path) {
  if (!v.is_object()) bad(path, "expected {c, a, form}");
  P.check_keys(v, path, {"c", "a", "form"});
  DecayLaw law;
  law.c = as_num(need(v, path + ".", "c"), path + ".c");
  if (const json* a = maybe(v, "a")) law.a = as_num(*a, path + ".a");
  if (const json* f = maybe(v, "form")) {
    std::string s = as_str(*f, path + ".form");
    if (s == "power")
      law.form = DecayLaw::Form::Power;
    else if (s == "exp")
      law.form = DecayLaw::Form::Exp;
    else
      bad(path + ".form", "expected \"power\" or \"exp\"");
  }
  try {
    law.validate(path);
  } catch (const GeometryError& e) {
    throw ConfigError(e.what());
  }
  return law;
}

json law_json(const DecayLaw& law) {
  return json{{"c", law.c}, {"a", law.a}, {"form", law.form == DecayLaw::Form::Power ? "power" : "exp"}};
}

InterfaceMeasure parse_measure(Parser& P, const json& v, const std::string& path) {
  if (!v.is_object()) bad(path, "expected {default, pieces}");
  P.check_keys(v, path, {"default", "pieces"});
  InterfaceMeasure mu;
  if (const json* d = maybe(v, "default")) mu.default_weight = as_weight(*d, path + ".default");
  if (const json* pieces = maybe(v, "pieces")) {
    if (!pieces->is_array()) bad(path + ".pieces", "expected an array");
    for (std::size_t i = 0; i < pieces->size(); ++i) {
      const json& pc = (*pieces)[i];
      std::string pp = strfmt("%s.pieces[%zu]", path.c_str(), i);
      if (!pc.is_object()) bad(pp, "expected {s0, s1, weight}");
      P.check_keys(pc, pp, {"s0", "s1", "weight"});
      WeightedArc arc;
      arc.span.s0 = as_num(need(pc, pp + ".", "s0"), pp + ".s0");
      arc.span.s1 = as_num(need(pc, pp + ".", "s1"), pp + ".s1");
      arc.weight = as_weight(need(pc, pp + ".", "weight"), pp + ".weight");
      mu.pieces.push_back(arc);
    }
  }
  return mu;
}

json measure_json(const InterfaceMeasure& mu) {
  json pieces = json::array();
  for (const WeightedArc& a : mu.pieces)
    pieces.push_back(json{{"s0", a.span.s0}, {"s1", a.span.s1}, {"weight", weight_json(a.weight)}});
  return json{{"default", weight_json(mu.default_weight)}, {"pieces", pieces}};
}

std::vector<Vec2> parse_shape(Parser& P, const json& v, const std::string& path) {
  if (!v.is_object()) bad(path, "expected {ngon: {...}} or {polygon: [...]}");
  P.check_keys(v, path, {"ngon", "polygon"});
  const json* ngon = maybe(v, "ngon");
  const json* poly = maybe(v, "polygon");
  if (static_cast<bool>(ngon) == static_cast<bool>(poly))
    bad(path, "expected exactly one of ngon, polygon");
  if (ngon) {
    std::string np = path + ".ngon";
    if (!ngon->is_object()) bad(np, "expected {center, r, n}");
    P.check_keys(*ngon, np, {"center", "r", "n"});
    Vec2 c = as_vec2(need(*ngon, np + ".", "center"), np + ".center");
    double r = as_num(need(*ngon, np + ".", "r"), np + ".r");
    int n = as_int(need(*ngon, np + ".", "n"), np + ".n");
    if (!(r > 0.0)) bad(np + ".r", "radius must be positive");
    if (n < 3) bad(np + ".n", "need at least 3 vertices");
    return regular_ngon(c, r, n);
  }
  if (!poly->is_array() || poly->size() < 3) bad(path + ".polygon", "expected >= 3 points");
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < poly->size(); ++i)
    pts.push_back(as_vec2((*poly)[i], strfmt("%s.polygon[%zu]", path.c_str(), i)));
  return pts;
}

json shape_json(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (Vec2 p : pts) arr.push_back(json::array({p.x, p.y}));
  return arr;
}

void require_section(bool present, const std::string& key, RunMode mode) {
  if (!present)
    throw ConfigError("missing required key: " + key + " (mode " + mode_name(mode) + ")");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  Parser P;
  P.check_keys(root, "", {"run", "domain", "interface", "sieve", "bulk", "lower", "measure",
                          "solver", "capacity", "monotone"});

  ExperimentConfig cfg;

  // run
  const json& run = need(root, "", "run");
  if (!run.is_object()) bad("run", "expected an object");
  P.check_keys(run, "run",
               {"mode", "out", "seed", "jobs", "h", "js", "rhos", "windows", "h_along", "rows",
                "tail_window", "equality_tol", "distance_q"});
  cfg.run.mode = mode_from_string(as_str(need(run, "run.", "mode"), "run.mode"));
  if (const json* v = maybe(run, "out")) cfg.run.out = as_str(*v, "run.out");
  if (const json* v = maybe(run, "seed")) cfg.run.seed = as_int(*v, "run.seed");
  if (const json* v = maybe(run, "jobs")) cfg.run.jobs = as_int(*v, "run.jobs");
  if (const json* v = maybe(run, "h")) {
    cfg.run.h = as_num(*v, "run.h");
    if (!(cfg.run.h > 0.0)) bad("run.h", "mesh size must be positive");
  }
  if (const json* v = maybe(run, "js")) {
    if (!v->is_array() || v->empty()) bad("run.js", "expected a nonempty array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      int j = as_int((*v)[i], strfmt("run.js[%zu]", i));
      if (j < 1) bad(strfmt("run.js[%zu]", i), "indices start at 1");
      if (!cfg.run.js.empty() && j <= cfg.run.js.back())
        bad("run.js", "must be strictly ascending");
      cfg.run.js.push_back(j);
    }
  }
  if (const json* v = maybe(run, "rhos")) {
    if (!v->is_array() || v->empty()) bad("run.rhos", "expected a nonempty array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      double r = as_num((*v)[i], strfmt("run.rhos[%zu]", i));
      if (!(r > 0.0)) bad(strfmt("run.rhos[%zu]", i), "must be positive");
      if (!cfg.run.rhos.empty() && r >= cfg.run.rhos.back())
        bad("run.rhos", "must be strictly decreasing");
      cfg.run.rhos.push_back(r);
    }
  }
  if (const json* v = maybe(run, "windows")) {
    if (!v->is_array() || v->empty()) bad("run.windows", "expected a nonempty array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      std::string wp = strfmt("run.windows[%zu]", i);
      Vec2 w = as_vec2((*v)[i], wp);
      if (!(w.x < w.y)) bad(wp, "expected [s0, s1] with s0 < s1");
      cfg.run.windows.push_back({w.x, w.y});
    }
  }
  if (const json* v = maybe(run, "h_along")) {
    cfg.run.h_along = as_num(*v, "run.h_along");
    if (!(cfg.run.h_along > 0.0)) bad("run.h_along", "must be positive");
  }
  if (const json* v = maybe(run, "rows")) {
    cfg.run.rows = as_int(*v, "run.rows");
    if (cfg.run.rows < 1) bad("run.rows", "need at least one row");
  }
  if (const json* v = maybe(run, "tail_window")) {
    cfg.run.tail_window = as_int(*v, "run.tail_window");
    if (cfg.run.tail_window < 1) bad("run.tail_window", "must be positive");
  }
  if (const json* v = maybe(run, "equality_tol")) {
    cfg.run.equality_tol = as_num(*v, "run.equality_tol");
    if (!(cfg.run.equality_tol > 0.0)) bad("run.equality_tol", "must be positive");
  }
  if (const json* v = maybe(run, "distance_q")) {
    cfg.run.distance_q = as_num(*v, "run.distance_q");
    if (!(cfg.run.distance_q >= 1.0)) bad("run.distance_q", "must be >= 1");
  }

  // domain
  if (const json* v = maybe(root, "domain")) {
    if (!v->is_object()) bad("domain", "expected an object");
    P.check_keys(*v, "domain", {"xmin", "xmax", "ymin", "ymax"});
    cfg.domain.xmin = as_num(need(*v, "domain.", "xmin"), "domain.xmin");
    cfg.domain.xmax = as_num(need(*v, "domain.", "xmax"), "domain.xmax");
    cfg.domain.ymin = as_num(need(*v, "domain.", "ymin"), "domain.ymin");
    cfg.domain.ymax = as_num(need(*v, "domain.", "ymax"), "domain.ymax");
    try {
      cfg.domain.validate();
    } catch (const GeometryError& e) {
      throw ConfigError(std::string("domain: ") + e.what());
    }
    cfg.has_domain = true;
  }

  // interface
  if (const json* v = maybe(root, "interface")) {
    if (!v->is_object()) bad("interface", "expected an object");
    P.check_keys(*v, "interface", {"a", "b", "profile", "test_mode"});
    Vec2 a = as_vec2(need(*v, "interface.", "a"), "interface.a");
    Vec2 b = as_vec2(need(*v, "interface.", "b"), "interface.b");
    std::vector<double> profile;
    if (const json* pr = maybe(*v, "profile")) {
      if (!pr->is_array()) bad("interface.profile", "expected an array of numbers");
      for (std::size_t i = 0; i < pr->size(); ++i)
        profile.push_back(as_num((*pr)[i], strfmt("interface.profile[%zu]", i)));
    }
    bool tm = false;
    if (const json* t = maybe(*v, "test_mode")) tm = as_bool(*t, "interface.test_mode");
    try {
      cfg.itf = build_interface(a, b, profile, tm);
    } catch (const GeometryError& e) {
      throw ConfigError(std::string("interface: ") + e.what());
    }
    cfg.has_interface = true;
  }

  // sieve
  if (const json* v = maybe(root, "sieve")) {
    if (!v->is_object()) bad("sieve", "expected an object");
    P.check_keys(*v, "sieve", {"kind", "period", "gap", "thickness"});
    std::string kind = as_str(need(*v, "sieve.", "kind"), "sieve.kind");
    if (kind == "empty")
      cfg.sieve.kind = SieveKind::Empty;
    else if (kind == "full_slab")
      cfg.sieve.kind = SieveKind::FullSlab;
    else if (kind == "crack")
      cfg.sieve.kind = SieveKind::CrackSieve;
    else if (kind == "perforated_slab")
      cfg.sieve.kind = SieveKind::PerforatedSlab;
    else
      bad("sieve.kind", "expected empty, full_slab, crack or perforated_slab");
    if (const json* law = maybe(*v, "period")) cfg.sieve.period = parse_law(P, *law, "sieve.period");
    if (const json* law = maybe(*v, "gap")) cfg.sieve.gap = parse_law(P, *law, "sieve.gap");
    if (const json* law = maybe(*v, "thickness"))
      cfg.sieve.thickness = parse_law(P, *law, "sieve.thickness");
    try {
      cfg.sieve.validate();
    } catch (const GeometryError& e) {
      throw ConfigError(std::string("sieve: ") + e.what());
    }
    cfg.has_sieve = true;
  }

  // bulk
  if (const json* v = maybe(root, "bulk")) {
    if (!v->is_object()) bad("bulk", "expected an object");
    P.check_keys(*v, "bulk", {"p", "A"});
    if (const json* p = maybe(*v, "p")) cfg.bulk.p = as_num(*p, "bulk.p");
    if (const json* A = maybe(*v, "A")) {
      if (!A->is_array() || A->size() != 2) bad("bulk.A", "expected [[a11,a12],[a21,a22]]");
      for (int r = 0; r < 2; ++r) {
        Vec2 row = as_vec2((*A)[static_cast<std::size_t>(r)], strfmt("bulk.A[%d]", r));
        cfg.bulk.A(r, 0) = row.x;
        cfg.bulk.A(r, 1) = row.y;
      }
    }
    try {
      cfg.bulk.validate();
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("bulk: ") + e.what());
    }
  }

  // lower
  if (const json* v = maybe(root, "lower")) {
    if (!v->is_object()) bad("lower", "expected an object");
    P.check_keys(*v, "lower", {"q", "h"});
    if (const json* q = maybe(*v, "q")) cfg.lower.q = as_num(*q, "lower.q");
    const json& h = need(*v, "lower.", "h");
    if (h.is_number()) {
      double c = as_num(h, "lower.h");
      cfg.lower.h = [c](double, double) { return c; };
      cfg.lower_h_text = fmt_g17(c);
    } else if (h.is_string()) {
      cfg.lower_h_text = h.get<std::string>();
      try {
        cfg.lower.h = compile_expr(cfg.lower_h_text);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("lower.h: ") + e.what());
      }
    } else {
      bad("lower.h", "expected a number or an expression string");
    }
    try {
      cfg.lower.validate();
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("lower: ") + e.what());
    }
    cfg.has_lower = true;
  }

  // measure
  if (const json* v = maybe(root, "measure")) {
    cfg.measure = parse_measure(P, *v, "measure");
    cfg.has_measure = true;
  }

  // solver
  if (const json* v = maybe(root, "solver")) {
    if (!v->is_object()) bad("solver", "expected an object");
    P.check_keys(*v, "solver",
                 {"linear_tol", "max_linear_iter", "armijo_c", "backtrack", "energy_stop",
                  "grad_stop", "max_descent_iter", "seed"});
    if (const json* x = maybe(*v, "linear_tol")) cfg.solver.linear_tol = as_num(*x, "solver.linear_tol");
    if (const json* x = maybe(*v, "max_linear_iter"))
      cfg.solver.max_linear_iter = as_int(*x, "solver.max_linear_iter");
    if (const json* x = maybe(*v, "armijo_c")) cfg.solver.armijo_c = as_num(*x, "solver.armijo_c");
    if (const json* x = maybe(*v, "backtrack")) cfg.solver.backtrack = as_num(*x, "solver.backtrack");
    if (const json* x = maybe(*v, "energy_stop")) cfg.solver.energy_stop = as_num(*x, "solver.energy_stop");
    if (const json* x = maybe(*v, "grad_stop")) cfg.solver.grad_stop = as_num(*x, "solver.grad_stop");
    if (const json* x = maybe(*v, "max_descent_iter"))
      cfg.solver.max_descent_iter = as_int(*x, "solver.max_descent_iter");
    if (const json* x = maybe(*v, "seed"))
      cfg.solver.seed = static_cast<unsigned>(as_int(*x, "solver.seed"));
    try {
      cfg.solver.validate();
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("solver: ") + e.what());
    }
  }

  // capacity
  if (const json* v = maybe(root, "capacity")) {
    if (!v->is_object()) bad("capacity", "expected an object");
    P.check_keys(*v, "capacity", {"outer", "inner", "h"});
    cfg.capacity.outer = parse_shape(P, need(*v, "capacity.", "outer"), "capacity.outer");
    cfg.capacity.inner = parse_shape(P, need(*v, "capacity.", "inner"), "capacity.inner");
    if (const json* h = maybe(*v, "h")) {
      cfg.capacity.h = as_num(*h, "capacity.h");
      if (!(cfg.capacity.h > 0.0)) bad("capacity.h", "must be positive");
    }
    cfg.has_capacity = true;
  }

  // monotone
  if (const json* v = maybe(root, "monotone")) {
    if (!v->is_object()) bad("monotone", "expected an object");
    P.check_keys(*v, "monotone", {"ladder", "limit"});
    const json& ladder = need(*v, "monotone.", "ladder");
    if (!ladder.is_array() || ladder.empty()) bad("monotone.ladder", "expected a nonempty array");
    for (std::size_t i = 0; i < ladder.size(); ++i)
      cfg.monotone.ladder.push_back(
          parse_measure(P, ladder[i], strfmt("monotone.ladder[%zu]", i)));
    cfg.monotone.limit = parse_measure(P, need(*v, "monotone.", "limit"), "monotone.limit");
    cfg.has_monotone = true;
  }

  if (!P.unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const std::string& k : P.unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  // Mode requirements and cross-section checks.
  RunMode m = cfg.run.mode;
  auto need_js = [&]() {
    if (cfg.run.js.empty()) throw ConfigError("missing required key: run.js (mode " + mode_name(m) + ")");
  };
  switch (m) {
    case RunMode::Perforated:
      require_section(cfg.has_domain, "domain", m);
      require_section(cfg.has_interface, "interface", m);
      require_section(cfg.has_sieve, "sieve", m);
      require_section(cfg.has_lower, "lower", m);
      need_js();
      break;
    case RunMode::Transmission:
      require_section(cfg.has_domain, "domain", m);
      require_section(cfg.has_interface, "interface", m);
      require_section(cfg.has_measure, "measure", m);
      require_section(cfg.has_lower, "lower", m);
      break;
    case RunMode::Cell:
    case RunMode::Reconstruct: {
      require_section(cfg.has_interface, "interface", m);
      if (cfg.has_sieve == cfg.has_measure)
        throw ConfigError("mode " + mode_name(m) + " needs exactly one of: sieve, measure");
      if (cfg.run.windows.empty())
        throw ConfigError("missing required key: run.windows (mode " + mode_name(m) + ")");
      if (cfg.run.rhos.empty())
        throw ConfigError("missing required key: run.rhos (mode " + mode_name(m) + ")");
      need_js();
      double r0 = cfg.itf.half_width;
      for (double rho : cfg.run.rhos)
        if (!(rho < r0 / 2.0))
          throw ConfigError(strfmt("run.rhos: rho = %g violates rho < r0/2 = %g", rho, r0 / 2.0));
      double L = cfg.itf.length();
      for (std::size_t i = 0; i < cfg.run.windows.size(); ++i) {
        const ArcInterval& w = cfg.run.windows[i];
        if (w.s0 < 0.0 || w.s1 > L)
          throw ConfigError(
              strfmt("run.windows[%zu]: [%g, %g] leaves the interface [0, %g]", i, w.s0, w.s1, L));
      }
      break;
    }
    case RunMode::Gamma:
      require_section(cfg.has_domain, "domain", m);
      require_section(cfg.has_interface, "interface", m);
      require_section(cfg.has_sieve, "sieve", m);
      require_section(cfg.has_measure, "measure", m);
      require_section(cfg.has_lower, "lower", m);
      need_js();
      break;
    case RunMode::Capacity:
      require_section(cfg.has_capacity, "capacity", m);
      break;
    case RunMode::Monotone:
      require_section(cfg.has_domain, "domain", m);
      require_section(cfg.has_interface, "interface", m);
      require_section(cfg.has_monotone, "monotone", m);
      require_section(cfg.has_lower, "lower", m);
      break;
  }
  if (cfg.has_measure && cfg.has_interface) {
    try {
      cfg.measure.validate(cfg.itf.length());
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("measure: ") + e.what());
    }
  }
  if (cfg.has_monotone && cfg.has_interface) {
    double L = cfg.itf.length();
    try {
      for (const InterfaceMeasure& mu : cfg.monotone.ladder) mu.validate(L);
      cfg.monotone.limit.validate(L);
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("monotone: ") + e.what());
    }
  }

  // Resolved echo with every default filled in (manifest and `validate`).
  json run_echo{{"mode", mode_name(m)},       {"out", cfg.run.out},
                {"seed", cfg.run.seed},       {"jobs", cfg.run.jobs},
                {"h", cfg.run.h},             {"h_along", cfg.run.h_along},
                {"rows", cfg.run.rows},       {"tail_window", cfg.run.tail_window},
                {"equality_tol", cfg.run.equality_tol}, {"distance_q", cfg.run.distance_q}};
  if (!cfg.run.js.empty()) run_echo["js"] = cfg.run.js;
  if (!cfg.run.rhos.empty()) run_echo["rhos"] = cfg.run.rhos;
  if (!cfg.run.windows.empty()) {
    json ws = json::array();
    for (const ArcInterval& w : cfg.run.windows) ws.push_back(json::array({w.s0, w.s1}));
    run_echo["windows"] = ws;
  }
  cfg.resolved["run"] = run_echo;
  if (cfg.has_domain)
    cfg.resolved["domain"] = json{{"xmin", cfg.domain.xmin},
                                  {"xmax", cfg.domain.xmax},
                                  {"ymin", cfg.domain.ymin},
                                  {"ymax", cfg.domain.ymax}};
  if (cfg.has_interface) {
    json itf{{"a", json::array({cfg.itf.a.x, cfg.itf.a.y})},
             {"b", json::array({cfg.itf.b.x, cfg.itf.b.y})},
             {"test_mode", cfg.itf.test_mode}};
    if (!cfg.itf.profile.empty()) itf["profile"] = cfg.itf.profile;
    cfg.resolved["interface"] = itf;
  }
  if (cfg.has_sieve) {
    json sv{{"kind", cfg.sieve.kind == SieveKind::Empty          ? "empty"
             : cfg.sieve.kind == SieveKind::FullSlab             ? "full_slab"
             : cfg.sieve.kind == SieveKind::CrackSieve           ? "crack"
                                                                 : "perforated_slab"}};
    if (cfg.sieve.kind == SieveKind::CrackSieve || cfg.sieve.kind == SieveKind::PerforatedSlab) {
      sv["period"] = law_json(cfg.sieve.period);
      sv["gap"] = law_json(cfg.sieve.gap);
    }
    if (cfg.sieve.kind == SieveKind::FullSlab || cfg.sieve.kind == SieveKind::PerforatedSlab)
      sv["thickness"] = law_json(cfg.sieve.thickness);
    cfg.resolved["sieve"] = sv;
  }
  cfg.resolved["bulk"] =
      json{{"p", cfg.bulk.p},
           {"A", json::array({json::array({cfg.bulk.A(0, 0), cfg.bulk.A(0, 1)}),
                              json::array({cfg.bulk.A(1, 0), cfg.bulk.A(1, 1)})})}};
  if (cfg.has_lower) cfg.resolved["lower"] = json{{"q", cfg.lower.q}, {"h", cfg.lower_h_text}};
  if (cfg.has_measure) cfg.resolved["measure"] = measure_json(cfg.measure);
  cfg.resolved["solver"] = json{{"linear_tol", cfg.solver.linear_tol},
                                {"max_linear_iter", cfg.solver.max_linear_iter},
                                {"armijo_c", cfg.solver.armijo_c},
                                {"backtrack", cfg.solver.backtrack},
                                {"energy_stop", cfg.solver.energy_stop},
                                {"grad_stop", cfg.solver.grad_stop},
                                {"max_descent_iter", cfg.solver.max_descent_iter},
                                {"seed", cfg.solver.seed}};
  if (cfg.has_capacity)
    cfg.resolved["capacity"] = json{{"outer", shape_json(cfg.capacity.outer)},
                                    {"inner", shape_json(cfg.capacity.inner)},
                                    {"h", cfg.capacity.h}};
  if (cfg.has_monotone) {
    json ladder = json::array();
    for (const InterfaceMeasure& mu : cfg.monotone.ladder) ladder.push_back(measure_json(mu));
    cfg.resolved["monotone"] = json{{"ladder", ladder}, {"limit", measure_json(cfg.monotone.limit)}};
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text);
}

}  // namespace sievelab
