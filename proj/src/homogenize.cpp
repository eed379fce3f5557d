#include "sievelab/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sievelab/util.hpp"

namespace sievelab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroFloor = 1e-8;  // per-length value treated as zero
constexpr double kSatTol = 0.1;      // saturation threshold on 1 - 2 rho m

void validate_table_inputs(const Interface& itf, ArcInterval window,
                           const std::vector<double>& rhos, const std::vector<int>& js,
                           const CellParams& params) {
  if (rhos.empty() || js.empty()) throw ConfigError("cell table ladders must be nonempty");
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] < rhos[i - 1])) throw ConfigError("rho ladder must be strictly decreasing");
  for (double rho : rhos)
    if (!(rho > 0.0 && rho < itf.half_width / 2.0))
      throw ConfigError(strfmt("rho %g outside (0, r0/2) with r0 = %g", rho, itf.half_width));
  for (std::size_t i = 1; i < js.size(); ++i)
    if (js[i] <= js[i - 1]) throw ConfigError("j range must be strictly ascending");
  if (js.front() < 1) throw ConfigError("j range must start at 1 or later");
  if (!(window.s1 > window.s0) || window.s0 < -1e-12 || window.s1 > itf.arclen.back() + 1e-12)
    throw ConfigError("window must be a nonempty arc interval of the interface");
  if (!(params.h_along > 0.0)) throw ConfigError("cell mesh spacing must be positive");
  if (params.rows < 1) throw ConfigError("cell mesh needs at least one element row per side");
  if (params.tail_window < 1) throw ConfigError("tail window must be at least 1");
}

template <class MakePattern>
CellTable table_impl(const Interface& itf, ArcInterval window, const std::vector<double>& rhos,
                     const std::vector<int>& js, const BulkConfig& bulk, const CellParams& params,
                     MakePattern make_pattern) {
  validate_table_inputs(itf, window, rhos, js, params);
  bulk.validate();

  CellTable table;
  table.window = window;
  table.interface_length = window.len();
  table.rhos = rhos;
  table.js = js;
  table.tail_window = params.tail_window;
  table.values.assign(rhos.size(), std::vector<CellEntry>(js.size()));

  auto record_failure = [](CellEntry& e, const std::exception& ex) {
    e.m = kNaN;
    e.per_length = kNaN;
    e.error = ex.what();
  };

  parallel_for(rhos.size() * js.size(), static_cast<std::size_t>(params.jobs),
               [&](std::size_t task) {
                 std::size_t r = task / js.size();
                 std::size_t c = task % js.size();
                 CellEntry& entry = table.values[r][c];
                 try {
                   CellMesh cm = build_strip_mesh(itf, window, rhos[r], params.h_along, params.rows);
                   CouplingPattern pat = make_pattern(cm, js[c]);
                   SolveResult sr = solve_cell(cm, pat, bulk, params.solver);
                   entry.m = sr.value;
                   entry.per_length = sr.value / cm.interface_length;
                 } catch (const GeometryError& ex) {
                   record_failure(entry, ex);
                 } catch (const MeshError& ex) {
                   record_failure(entry, ex);
                 } catch (const SolveError& ex) {
                   record_failure(entry, ex);
                 }
               });
  return table;
}

}  // namespace

CellTable::Tail CellTable::tail(std::size_t rho_index) const {
  std::vector<double> valid;
  for (const CellEntry& e : values.at(rho_index))
    if (!std::isnan(e.per_length)) valid.push_back(e.per_length);
  Tail t;
  std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(tail_window), valid.size());
  t.count = static_cast<int>(take);
  if (take == 0) {
    t.lo = t.hi = t.mean = kNaN;
    return t;
  }
  t.lo = kInf;
  t.hi = -kInf;
  t.mean = 0.0;
  for (std::size_t i = valid.size() - take; i < valid.size(); ++i) {
    t.lo = std::min(t.lo, valid[i]);
    t.hi = std::max(t.hi, valid[i]);
    t.mean += valid[i];
  }
  t.mean /= static_cast<double>(take);
  return t;
}

CellTable cell_table(const SieveSpec& spec, const Interface& itf, ArcInterval window,
                     const std::vector<double>& rhos, const std::vector<int>& js,
                     const BulkConfig& bulk, const CellParams& params) {
  spec.validate();
  return table_impl(itf, window, rhos, js, bulk, params,
                    [&](const CellMesh& cm, int j) {
                      return apply_sieve(cm.mesh, sieve_at(spec, itf, j));
                    });
}

CellTable cell_table(const InterfaceMeasure& mu, const Interface& itf, ArcInterval window,
                     const std::vector<double>& rhos, const std::vector<int>& js,
                     const BulkConfig& bulk, const CellParams& params) {
  mu.validate(itf.arclen.back());
  return table_impl(itf, window, rhos, js, bulk, params,
                    [&](const CellMesh& cm, int) { return pattern_from_measure(cm.mesh, mu); });
}

std::vector<EqualityFlag> equality_condition(const CellTable& table, double tol) {
  if (!(tol > 0.0)) throw ConfigError("equality tolerance must be positive");
  if (table.js.size() < 3)
    throw ConfigError("equality condition needs at least 3 entries in the j range");
  std::vector<EqualityFlag> flags;
  flags.reserve(table.rhos.size());
  for (std::size_t r = 0; r < table.rhos.size(); ++r) {
    CellTable::Tail t = table.tail(r);
    EqualityFlag f;
    f.rho = table.rhos[r];
    f.valid = t.count;
    if (t.count < std::min(table.tail_window, static_cast<int>(table.js.size()))) {
      f.tail_min = f.tail_max = f.oscillation = kNaN;
      f.holds = false;
    } else {
      f.tail_min = t.lo;
      f.tail_max = t.hi;
      f.oscillation = (t.hi - t.lo) / std::max(t.hi, 1e-12);
      f.holds = f.oscillation <= tol;
    }
    flags.push_back(f);
  }
  return flags;
}

ReconstructedDensity reconstruct_theta(const CellTable& table, double equality_tol) {
  std::vector<EqualityFlag> flags = equality_condition(table, equality_tol);

  WindowEstimate w;
  w.window = table.window;
  w.theta_by_rho.assign(table.rhos.size(), kNaN);
  w.rho_reliable.assign(table.rhos.size(), 0);

  int chosen = -1;    // smallest reliable rho (ladder is decreasing)
  int fallback = -1;  // smallest rho with a usable tail at all
  for (std::size_t r = 0; r < table.rhos.size(); ++r) {
    CellTable::Tail t = table.tail(r);
    if (t.count == 0) continue;
    double rho = table.rhos[r];
    double denom = 1.0 - 2.0 * rho * t.mean;
    double theta;
    if (t.mean <= kZeroFloor)
      theta = 0.0;
    else if (denom <= kSatTol)
      theta = kInf;
    else
      theta = t.mean / denom;
    w.theta_by_rho[r] = theta;
    fallback = static_cast<int>(r);
    if (flags[r].holds) {
      w.rho_reliable[r] = 1;
      chosen = static_cast<int>(r);
    }
  }
  if (fallback < 0) throw SolveError("reconstruction window has no valid cell values");

  w.reliable = chosen >= 0;
  w.subsequence_dependent = !w.reliable;
  int use = w.reliable ? chosen : fallback;
  w.theta_hat = w.theta_by_rho[static_cast<std::size_t>(use)];
  w.chosen_rho = table.rhos[static_cast<std::size_t>(use)];
  w.m_bar = table.tail(static_cast<std::size_t>(use)).mean;

  double fmin = kInf, fmax = -kInf;
  int finite = 0;
  for (double th : w.theta_by_rho) {
    if (std::isnan(th) || std::isinf(th)) continue;
    fmin = std::min(fmin, th);
    fmax = std::max(fmax, th);
    ++finite;
  }
  w.spread = finite > 1 ? (fmax - fmin) / std::max(fmax, 1e-12) : 0.0;

  ReconstructedDensity d;
  d.windows.push_back(std::move(w));
  return d;
}

ReconstructedDensity reconstruct_theta(const std::vector<CellTable>& tables, double equality_tol) {
  if (tables.empty()) throw ConfigError("reconstruction needs at least one window table");
  ReconstructedDensity d;
  for (const CellTable& t : tables) {
    ReconstructedDensity part = reconstruct_theta(t, equality_tol);
    d.windows.push_back(std::move(part.windows.front()));
  }
  return d;
}

InterfaceMeasure ReconstructedDensity::measure(double default_weight) const {
  InterfaceMeasure mu;
  mu.default_weight = default_weight;
  for (const WindowEstimate& w : windows) mu.pieces.push_back({w.window, w.theta_hat});
  std::sort(mu.pieces.begin(), mu.pieces.end(),
            [](const WeightedArc& a, const WeightedArc& b) { return a.span.s0 < b.span.s0; });
  return mu;
}

ConvergenceReport gamma_harness(const SieveSpec& spec, const InterfaceMeasure& mu,
                                const Domain& dom, const Interface& itf, const BulkConfig& bulk,
                                const LowerOrderConfig& low, const std::vector<int>& js,
                                const GammaParams& params) {
  if (js.empty()) throw ConfigError("gamma harness needs a nonempty j range");
  for (std::size_t i = 1; i < js.size(); ++i)
    if (js[i] <= js[i - 1]) throw ConfigError("j range must be strictly ascending");
  spec.validate();
  mu.validate(itf.arclen.back());

  ConvergenceReport report;
  report.q = params.distance_q;

  InterfaceMesh mesh = triangulate(dom, itf, params.h);
  SolveResult limit = solve_global(mesh, nullptr, &mu, bulk, low, params.solver);
  report.limit_value = limit.value;
  report.limit_stats = limit.stats;
  Field zero = limit.u;
  zero.coeffs.setZero();
  report.limit_norm = lq_distance(limit.u, zero, params.distance_q);

  report.per_j.resize(js.size());
  parallel_for(js.size(), static_cast<std::size_t>(params.jobs), [&](std::size_t i) {
    CouplingPattern pat = apply_sieve(mesh, sieve_at(spec, itf, js[i]));
    SolveResult r = solve_global(mesh, &pat, nullptr, bulk, low, params.solver);
    JRecord rec;
    rec.j = js[i];
    rec.min_value = r.value;
    rec.lq_distance = lq_distance(r.u, limit.u, params.distance_q);
    rec.energy_gap = r.value - limit.value;
    rec.stats = r.stats;
    report.per_j[i] = rec;
  });

  report.distances_decreasing = report.per_j.size() > 1;
  for (std::size_t i = 1; i < report.per_j.size(); ++i)
    if (!(report.per_j[i].lq_distance < report.per_j[i - 1].lq_distance))
      report.distances_decreasing = false;
  if (report.per_j.size() >= 3) {
    report.tail_gaps_nonincreasing = true;
    for (std::size_t i = report.per_j.size() - 2; i < report.per_j.size(); ++i) {
      double prev = std::abs(report.per_j[i - 1].energy_gap);
      double cur = std::abs(report.per_j[i].energy_gap);
      if (cur > prev * (1.0 + 1e-12) + 1e-15) report.tail_gaps_nonincreasing = false;
    }
  }
  report.final_relative_distance =
      report.per_j.back().lq_distance / std::max(report.limit_norm, 1e-300);
  report.final_relative_gap =
      std::abs(report.per_j.back().energy_gap) / std::max(std::abs(report.limit_value), 1e-300);
  return report;
}

MonotoneReport monotone_limit_check(const InterfaceMesh& mesh,
                                    const std::vector<InterfaceMeasure>& ladder,
                                    const InterfaceMeasure& limit, const BulkConfig& bulk,
                                    const LowerOrderConfig& low, const SolverOptions& opts) {
  if (ladder.empty()) throw ConfigError("monotone check needs a nonempty measure ladder");
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    double s = (mesh.edges[e].s0 + mesh.edges[e].s1) / 2.0;
    for (std::size_t k = 0; k + 1 < ladder.size(); ++k)
      if (!(ladder[k].weight_at(s) <= ladder[k + 1].weight_at(s) + 1e-12))
        throw ConfigError("measure ladder is not pointwise nondecreasing");
    if (!(ladder.back().weight_at(s) <= limit.weight_at(s) + 1e-12))
      throw ConfigError("measure ladder exceeds its limit measure");
  }

  MonotoneReport report;
  for (const InterfaceMeasure& mu : ladder)
    report.min_values.push_back(solve_global(mesh, nullptr, &mu, bulk, low, opts).value);
  report.limit_value = solve_global(mesh, nullptr, &limit, bulk, low, opts).value;

  report.nondecreasing = true;
  for (std::size_t k = 1; k < report.min_values.size(); ++k) {
    double slack = 1e-7 * (1.0 + std::abs(report.min_values[k - 1]));
    if (report.min_values[k] < report.min_values[k - 1] - slack) report.nondecreasing = false;
  }
  report.final_gap = report.limit_value - report.min_values.back();
  report.final_relative_gap = std::abs(report.final_gap) / std::max(std::abs(report.limit_value), 1e-300);
  return report;
}

}  // namespace sievelab
