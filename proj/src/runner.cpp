#include "sievelab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "sievelab/homogenize.hpp"
#include "sievelab/io.hpp"
#include "sievelab/svg.hpp"
#include "sievelab/util.hpp"

namespace sievelab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json stats_json(const std::string& label, const SolveStats& s) {
  return json{{"label", label},
              {"iterations", s.iterations},
              {"residual", s.residual},
              {"converged", s.converged},
              {"quadratic_path", s.quadratic_path}};
}

json num_or_token(double v) {
  if (std::isnan(v)) return json("nan");
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

NamedField nodal_field(const Field& u, const std::string& name) {
  NamedField f;
  f.name = name;
  f.values.resize(u.mesh->nodes.size());
  for (std::size_t n = 0; n < f.values.size(); ++n)
    f.values[n] = u.at_node(static_cast<int>(n));
  return f;
}

struct Emitter {
  fs::path dir;
  bool quiet = false;
  json artifacts = json::array();

  void write(const std::string& name, const std::string& text) {
    write_text_file((dir / name).string(), text);
    artifacts.push_back(name);
    if (!quiet) std::printf("  wrote %s\n", name.c_str());
  }
};

}  // namespace

std::string resolve_out_dir(const ExperimentConfig& cfg, const RunOverrides& ov) {
  if (!ov.out.empty()) return ov.out;
  fs::path out = cfg.run.out;
  const char* root = std::getenv("SIEVELAB_OUT");
  if (root && *root && out.is_relative()) out = fs::path(root) / out;
  return out.string();
}

std::string run_experiment(const ExperimentConfig& cfg, const RunOverrides& ov) {
  Emitter em;
  em.dir = resolve_out_dir(cfg, ov);
  em.quiet = ov.quiet;
  int jobs = ov.jobs > 0 ? ov.jobs : cfg.run.jobs;
  fs::create_directories(em.dir);
  if (!ov.quiet)
    std::printf("mode %s -> %s\n", mode_name(cfg.run.mode).c_str(), em.dir.string().c_str());

  json manifest;
  manifest["config"] = cfg.resolved;
  json solves = json::array();
  json results;

  switch (cfg.run.mode) {
    case RunMode::Perforated: {
      InterfaceMesh mesh = triangulate(cfg.domain, cfg.itf, cfg.run.h);
      manifest["mesh"] = json{{"nodes", mesh.nodes.size()},
                              {"triangles", mesh.triangles.size()},
                              {"edges", mesh.edges.size()}};
      json per_j = json::array();
      for (int j : cfg.run.js) {
        CouplingPattern pattern = apply_sieve(mesh, sieve_at(cfg.sieve, cfg.itf, j));
        SolveResult r = solve_global(mesh, &pattern, nullptr, cfg.bulk, cfg.lower, cfg.solver);
        std::string tag = strfmt("j%d", j);
        solves.push_back(stats_json("perforated_" + tag, r.stats));
        per_j.push_back(json{{"j", j}, {"min_value", r.value}});
        MeshBundle b{mesh, pattern, {nodal_field(r.u, "u")}};
        em.write("perforated_" + tag + ".txt", bundle_text(b));
        em.write("heatmap_" + tag + ".svg", heatmap_svg(r.u, "perforated minimiser, " + tag));
        em.write("jump_" + tag + ".svg", jump_profile_svg(r.u, "interface jump, " + tag));
      }
      results["per_j"] = per_j;
      break;
    }
    case RunMode::Transmission: {
      InterfaceMesh mesh = triangulate(cfg.domain, cfg.itf, cfg.run.h);
      manifest["mesh"] = json{{"nodes", mesh.nodes.size()},
                              {"triangles", mesh.triangles.size()},
                              {"edges", mesh.edges.size()}};
      SolveResult r = solve_global(mesh, nullptr, &cfg.measure, cfg.bulk, cfg.lower, cfg.solver);
      solves.push_back(stats_json("transmission", r.stats));
      results["min_value"] = r.value;
      MeshBundle b{mesh, pattern_from_measure(mesh, cfg.measure), {nodal_field(r.u, "u")}};
      em.write("transmission.txt", bundle_text(b));
      em.write("heatmap.svg", heatmap_svg(r.u, "transmission minimiser"));
      em.write("jump.svg", jump_profile_svg(r.u, "interface jump"));
      break;
    }
    case RunMode::Cell:
    case RunMode::Reconstruct: {
      CellParams params;
      params.h_along = cfg.run.h_along;
      params.rows = cfg.run.rows;
      params.tail_window = cfg.run.tail_window;
      params.jobs = jobs;
      params.solver = cfg.solver;
      std::vector<CellTable> tables;
      int gaps = 0;
      for (const ArcInterval& w : cfg.run.windows) {
        CellTable t = cfg.has_sieve
                          ? cell_table(cfg.sieve, cfg.itf, w, cfg.run.rhos, cfg.run.js, cfg.bulk,
                                       params)
                          : cell_table(cfg.measure, cfg.itf, w, cfg.run.rhos, cfg.run.js, cfg.bulk,
                                       params);
        for (std::size_t r = 0; r < t.rhos.size(); ++r)
          for (std::size_t c = 0; c < t.js.size(); ++c) {
            const CellEntry& e = t.values[r][c];
            json rec{{"label", strfmt("cell_w%.17g_rho%.17g_j%d", w.s0, t.rhos[r], t.js[c])},
                     {"ok", e.error.empty()}};
            if (!e.error.empty()) {
              rec["error"] = e.error;
              ++gaps;
            }
            solves.push_back(rec);
          }
        tables.push_back(std::move(t));
      }
      em.write("cell_table.csv", cell_table_csv(tables));
      results["cell_gaps"] = gaps;  // failed cells are flagged, not fatal
      if (cfg.run.mode == RunMode::Reconstruct) {
        ReconstructedDensity density = reconstruct_theta(tables, cfg.run.equality_tol);
        em.write("theta.csv", theta_csv(density));
        json windows = json::array();
        for (const WindowEstimate& w : density.windows)
          windows.push_back(json{{"window", json::array({w.window.s0, w.window.s1})},
                                 {"theta_hat", num_or_token(w.theta_hat)},
                                 {"chosen_rho", w.chosen_rho},
                                 {"spread", num_or_token(w.spread)},
                                 {"reliable", w.reliable},
                                 {"subsequence_dependent", w.subsequence_dependent}});
        results["windows"] = windows;
      }
      break;
    }
    case RunMode::Gamma: {
      GammaParams params;
      params.h = cfg.run.h;
      params.distance_q = cfg.run.distance_q;
      params.jobs = jobs;
      params.solver = cfg.solver;
      ConvergenceReport report = gamma_harness(cfg.sieve, cfg.measure, cfg.domain, cfg.itf,
                                               cfg.bulk, cfg.lower, cfg.run.js, params);
      solves.push_back(stats_json("limit", report.limit_stats));
      for (const JRecord& r : report.per_j)
        solves.push_back(stats_json(strfmt("perforated_j%d", r.j), r.stats));
      em.write("report.csv", report_csv(report));
      em.write("convergence.svg", convergence_svg(report));
      results = json{{"limit_value", report.limit_value},
                     {"limit_norm", report.limit_norm},
                     {"distances_decreasing", report.distances_decreasing},
                     {"tail_gaps_nonincreasing", report.tail_gaps_nonincreasing},
                     {"final_relative_distance", report.final_relative_distance},
                     {"final_relative_gap", report.final_relative_gap}};
      break;
    }
    case RunMode::Capacity: {
      CapacityOptions opts;
      opts.h = cfg.capacity.h;
      opts.solver = cfg.solver;
      double value = capacity(cfg.capacity.outer, cfg.capacity.inner, cfg.bulk.p, opts);
      solves.push_back(json{{"label", "capacity"}, {"ok", true}});
      // the analytic comparison is a test concern; the field stays null here
      json cap{{"p", cfg.bulk.p}, {"h", cfg.capacity.h}, {"value", value}, {"oracle", nullptr}};
      em.write("capacity.json", cap.dump(2) + "\n");
      results["value"] = value;
      break;
    }
    case RunMode::Monotone: {
      InterfaceMesh mesh = triangulate(cfg.domain, cfg.itf, cfg.run.h);
      manifest["mesh"] = json{{"nodes", mesh.nodes.size()},
                              {"triangles", mesh.triangles.size()},
                              {"edges", mesh.edges.size()}};
      MonotoneReport report = monotone_limit_check(mesh, cfg.monotone.ladder, cfg.monotone.limit,
                                                   cfg.bulk, cfg.lower, cfg.solver);
      for (std::size_t i = 0; i < report.min_values.size(); ++i)
        solves.push_back(json{{"label", strfmt("ladder_%zu", i)}, {"ok", true},
                              {"min_value", report.min_values[i]}});
      solves.push_back(json{{"label", "limit"}, {"ok", true}, {"min_value", report.limit_value}});
      json mono{{"min_values", report.min_values},
                {"limit_value", report.limit_value},
                {"nondecreasing", report.nondecreasing},
                {"final_gap", report.final_gap},
                {"final_relative_gap", report.final_relative_gap}};
      em.write("monotone.json", mono.dump(2) + "\n");
      results = mono;
      break;
    }
  }

  manifest["solves"] = solves;
  manifest["solve_count"] = solves.size();
  manifest["results"] = results;
  manifest["artifacts"] = em.artifacts;
  em.write("manifest.json", manifest.dump(2) + "\n");
  return em.dir.string();
}

}  // namespace sievelab
