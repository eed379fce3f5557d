#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sievelab/config.hpp"
#include "sievelab/expr.hpp"
#include "sievelab/io.hpp"
#include "sievelab/solve.hpp"
#include "sievelab/util.hpp"

using namespace sievelab;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

InterfaceMesh demo_mesh() {
  Domain dom{0.0, 1.0, 0.0, 1.0};
  Interface itf = build_interface({0.0, 0.5}, {1.0, 0.5}, {}, true);
  return triangulate(dom, itf, 0.25);
}

std::string minimal_transmission(double h = 0.125) {
  return strfmt(R"json({
    "run": {"mode": "transmission", "h": %g},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "measure": {"default": 1.0},
    "lower": {"h": "step(x)"}
  })json", h);
}

// Scratch directory per test run plus subprocess plumbing for the CLI.
struct CliFixture {
  fs::path dir;
  CliFixture() {
    dir = fs::path("/tmp") / strfmt("sievelab_test_%d_%zu", getpid(),
                                    static_cast<std::size_t>(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~CliFixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    fs::path p = dir / name;
    write_text_file(p.string(), text);
    return p;
  }
  int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr,
          const std::string& env = "") const {
    fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + SIEVELAB_CLI_PATH + " " + args + " >" +
                      so.string() + " 2>" + se.string();
    int rc = std::system(cmd.c_str());
    if (out) *out = read_text_file(so.string());
    if (err) *err = read_text_file(se.string());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
};

}  // namespace

TEST_CASE("mesh bundles round trip byte for byte") {
  InterfaceMesh mesh = demo_mesh();
  InterfaceMeasure mu;
  mu.default_weight = kInf;
  mu.pieces.push_back({{0.0, 0.25}, 0.0});
  // an awkward weight that needs all 17 digits
  mu.pieces.push_back({{0.25, 0.75}, std::nextafter(2.5, 3.0)});
  CouplingPattern pat = pattern_from_measure(mesh, mu);

  MeshBundle b;
  b.mesh = mesh;
  b.pattern = pat;
  b.fields.push_back({"solution", std::vector<double>(mesh.nodes.size(), 0.0)});
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
    b.fields[0].values[n] = std::sin(static_cast<double>(n)) / 3.0;

  std::string text = bundle_text(b);
  MeshBundle parsed = parse_bundle(text);
  CHECK(bundle_text(parsed) == text);

  REQUIRE(parsed.mesh.nodes.size() == mesh.nodes.size());
  CHECK(parsed.mesh.n_base_nodes == mesh.n_base_nodes);
  CHECK(parsed.mesh.max_diameter == mesh.max_diameter);
  REQUIRE(parsed.mesh.tri_side.size() == mesh.tri_side.size());
  for (std::size_t t = 0; t < mesh.tri_side.size(); ++t)
    CHECK(parsed.mesh.tri_side[t] == mesh.tri_side[t]);
  REQUIRE(parsed.pattern.state.size() == pat.state.size());
  for (std::size_t e = 0; e < pat.state.size(); ++e) {
    CHECK(parsed.pattern.state[e] == pat.state[e]);
    CHECK(parsed.pattern.theta[e] == pat.theta[e]);  // bit-exact
  }
  REQUIRE(parsed.fields.size() == 1);
  CHECK(parsed.fields[0].name == "solution");
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
    CHECK(parsed.fields[0].values[n] == b.fields[0].values[n]);

  // pattern omitted: everything reads back tied
  MeshBundle plain = parse_bundle(mesh_text(mesh));
  for (EdgeState s : plain.pattern.state) CHECK(s == EdgeState::Tied);
}

TEST_CASE("bundle parser reports the offending line") {
  auto message_of = [](const std::string& text) {
    try {
      parse_bundle(text);
    } catch (const IoError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message_of("garbage header\n").find("line 1") != std::string::npos);

  std::string good = mesh_text(demo_mesh());
  // break the second line (first node record)
  std::string broken = good;
  std::size_t p1 = broken.find('\n') + 1;
  broken.replace(p1, broken.find('\n', p1) - p1, "7 0 0");
  CHECK(message_of(broken).find("line 2") != std::string::npos);

  CHECK(message_of("nodes 1 triangles 0 edges 0 h 0.25\n0 0 0\nfield bad name 1\n0 1\n")
            .find("line 3") != std::string::npos);

  InterfaceMesh mesh = demo_mesh();
  CouplingPattern pat = all_tied(mesh);
  pat.state[0] = EdgeState::Penalized;
  pat.theta[0] = 2.0;
  std::string pen = mesh_text(mesh, &pat);
  std::size_t at = pen.find("pen:2");
  REQUIRE(at != std::string::npos);
  std::string neg = pen;
  neg.replace(at, 5, "pen:0");
  CHECK(message_of(neg).find("weight") != std::string::npos);

  CouplingPattern short_pat = all_tied(mesh);
  short_pat.state.pop_back();
  CHECK_THROWS_AS(mesh_text(mesh, &short_pat), IoError);
}

TEST_CASE("csv artifacts spell special values consistently") {
  CellTable t;
  t.window = {0.25, 0.75};
  t.interface_length = 0.5;
  t.rhos = {0.1};
  t.js = {1, 2};
  t.values = {{CellEntry{0.5, 1.0, ""},
               CellEntry{std::nan(""), std::nan(""), "collapsed"}}};
  std::string csv = cell_table_csv({t});
  CHECK(csv.find("window,rho,j,m,per_length\n") == 0);
  std::string row = "0.25:0.75," + fmt_g17(0.1);
  CHECK(csv.find(row + ",1,0.5,1\n") != std::string::npos);
  CHECK(csv.find(row + ",2,nan,nan\n") != std::string::npos);

  ReconstructedDensity d;
  WindowEstimate w;
  w.window = {0.0, 1.0};
  w.theta_hat = kInf;
  w.spread = 0.0;
  d.windows.push_back(w);
  std::string theta = theta_csv(d);
  CHECK(theta.find("window_start,window_end,theta_hat,spread\n") == 0);
  CHECK(theta.find("0,1,inf,0\n") != std::string::npos);

  ConvergenceReport rep;
  rep.per_j.push_back({3, 0.25, 0.125, -0.5, {}});
  std::string rcsv = report_csv(rep);
  CHECK(rcsv.find("j,min_value,lq_distance,energy_gap\n") == 0);
  CHECK(rcsv.find("3,0.25,0.125,-0.5\n") != std::string::npos);
}

TEST_CASE("config defaults and the resolved echo") {
  ExperimentConfig cfg = parse_config_text(minimal_transmission());
  CHECK(cfg.run.mode == RunMode::Transmission);
  CHECK(cfg.run.out == "out");
  CHECK(cfg.run.seed == 0);
  CHECK(cfg.run.jobs == 1);
  CHECK(cfg.run.h == doctest::Approx(0.125));
  CHECK(cfg.run.equality_tol == doctest::Approx(0.05));
  CHECK(cfg.run.distance_q == doctest::Approx(2.0));
  CHECK(cfg.bulk.p == doctest::Approx(2.0));
  CHECK(cfg.lower.q == doctest::Approx(2.0));
  CHECK(std::isinf(cfg.measure.default_weight) == false);
  CHECK(cfg.measure.default_weight == doctest::Approx(1.0));
  CHECK(cfg.lower_h_text == "step(x)");
  CHECK(cfg.itf.length() == doctest::Approx(1.0));

  CHECK(cfg.resolved["run"]["mode"] == "transmission");
  CHECK(cfg.resolved["run"]["out"] == "out");
  CHECK(cfg.resolved["lower"]["h"] == "step(x)");
  CHECK(cfg.resolved["solver"]["linear_tol"].get<double>() == doctest::Approx(1e-10));
  CHECK(cfg.resolved["measure"]["default"].get<double>() == doctest::Approx(1.0));

  // weights echo back in the same form they are written
  ExperimentConfig tied = parse_config_text(R"json({
    "run": {"mode": "transmission"},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "measure": {"default": "inf", "pieces": [{"s0": 0.25, "s1": 0.5, "weight": 0}]},
    "lower": {"h": 0.5}
  })json");
  CHECK(std::isinf(tied.measure.default_weight));
  CHECK(tied.measure.pieces[0].weight == 0.0);
  CHECK(tied.resolved["measure"]["default"] == "inf");
  CHECK(tied.lower_h_text == fmt_g17(0.5));
  CHECK(tied.lower.h(0.3, 0.9) == doctest::Approx(0.5));
}

TEST_CASE("config errors name the offending keys") {
  auto message_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };

  CHECK(message_of("{").find("config parse error") != std::string::npos);
  CHECK(message_of("[1, 2]").find("root") != std::string::npos);

  std::string unknown = message_of(R"json({
    "run": {"mode": "transmission", "bogus": 1},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "measure": {"default": 1.0},
    "lower": {"h": "step(x)"},
    "typo_section": {}
  })json");
  CHECK(unknown.find("unknown config keys:") != std::string::npos);
  CHECK(unknown.find("run.bogus") != std::string::npos);
  CHECK(unknown.find("typo_section") != std::string::npos);

  std::string missing = message_of(R"json({
    "run": {"mode": "transmission"},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "lower": {"h": "step(x)"}
  })json");
  CHECK(missing.find("measure") != std::string::npos);
  CHECK(missing.find("transmission") != std::string::npos);

  CHECK(message_of(R"json({"run": {"mode": "warp"}})json").find("unknown mode") != std::string::npos);
  CHECK(message_of(R"json({"run": {"mode": "transmission", "js": [2, 1]}})json")
            .find("strictly ascending") != std::string::npos);
  CHECK(message_of(R"json({"run": {"mode": "transmission", "rhos": [0.1, 0.2]}})json")
            .find("strictly decreasing") != std::string::npos);

  std::string cell_both = message_of(R"json({
    "run": {"mode": "cell", "js": [1], "rhos": [0.1], "windows": [[0.2, 0.8]]},
    "interface": {"a": [0, 0], "b": [1, 0]},
    "sieve": {"kind": "empty"},
    "measure": {"default": 1.0}
  })json");
  CHECK(cell_both.find("exactly one of: sieve, measure") != std::string::npos);

  std::string rho_big = message_of(R"json({
    "run": {"mode": "cell", "js": [1], "rhos": [0.4], "windows": [[0.2, 0.8]]},
    "interface": {"a": [0, 0], "b": [1, 0]},
    "measure": {"default": 1.0}
  })json");
  CHECK(rho_big.find("rho < r0/2") != std::string::npos);

  std::string win_out = message_of(R"json({
    "run": {"mode": "cell", "js": [1], "rhos": [0.2], "windows": [[0.5, 1.5]]},
    "interface": {"a": [0, 0], "b": [1, 0]},
    "measure": {"default": 1.0}
  })json");
  CHECK(win_out.find("run.windows[0]") != std::string::npos);

  std::string bad_law = message_of(R"json({
    "run": {"mode": "gamma", "js": [1, 2]},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "sieve": {"kind": "crack", "period": {"c": 0, "a": 1}, "gap": {"c": 0.1}},
    "measure": {"default": "inf"},
    "lower": {"h": "step(x)"}
  })json");
  CHECK(bad_law.find("sieve.period.c") != std::string::npos);

  CHECK(message_of(R"json({
    "run": {"mode": "transmission"},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "measure": {"default": -2},
    "lower": {"h": "step(x)"}
  })json").find("nonnegative") != std::string::npos);

  CHECK(message_of(R"json({
    "run": {"mode": "transmission"},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "measure": {"default": "huge"},
    "lower": {"h": "step(x)"}
  })json").find("\"inf\"") != std::string::npos);
}

TEST_CASE("expression compiler") {
  auto f = compile_expr("step(x) * (1 + y)");
  CHECK(f(0.5, 1.0) == doctest::Approx(2.0));
  CHECK(f(-0.5, 1.0) == doctest::Approx(0.0));
  CHECK(f(0.0, 1.0) == doctest::Approx(0.0));  // step(0) = 0

  CHECK(compile_expr("2^3 + 1")(0, 0) == doctest::Approx(9.0));
  CHECK(compile_expr("2^3^2")(0, 0) == doctest::Approx(512.0));  // right associative
  CHECK(compile_expr("-x^2")(2.0, 0) == doctest::Approx(-4.0));
  CHECK(compile_expr("x^-2")(2.0, 0) == doctest::Approx(0.25));
  CHECK(compile_expr("(-x)^2")(2.0, 0) == doctest::Approx(4.0));
  CHECK(compile_expr("sin(x)*cos(y)")(0.3, 0.4) ==
        doctest::Approx(std::sin(0.3) * std::cos(0.4)));
  CHECK(compile_expr("sqrt(abs(x))")(-4.0, 0) == doctest::Approx(2.0));
  CHECK(compile_expr("exp(log(x))")(2.5, 0) == doctest::Approx(2.5));

  CHECK_THROWS_AS(compile_expr("x +"), ConfigError);
  CHECK_THROWS_AS(compile_expr("frob(x)"), ConfigError);
  CHECK_THROWS_AS(compile_expr(""), ConfigError);
  CHECK_THROWS_AS(compile_expr("x ) y"), ConfigError);
}

TEST_CASE("cli: validate, error paths and exit codes") {
  CliFixture cli;
  fs::path good = cli.write("good.json", minimal_transmission());
  std::string out, err;
  CHECK(cli.run("validate " + good.string(), &out, &err) == 0);
  CHECK(out.rfind("ok\n", 0) == 0);
  CHECK(out.find("\"mode\": \"transmission\"") != std::string::npos);

  fs::path bad = cli.write("bad.json", R"json({"run": {"mode": "warp"}})json");
  CHECK(cli.run("validate " + bad.string(), &out, &err) == 2);
  CHECK(err.find("config error:") != std::string::npos);
  CHECK(err.find("unknown mode") != std::string::npos);

  CHECK(cli.run("run " + (cli.dir / "missing.json").string(), &out, &err) == 2);
  CHECK(cli.run("", &out, &err) == 2);          // no subcommand
  CHECK(cli.run("--help", &out, &err) == 0);
  CHECK(out.find("run") != std::string::npos);  // usage text mentions subcommands
}

TEST_CASE("cli: a run produces a manifest that accounts for every solve") {
  CliFixture cli;
  fs::path cfg = cli.write("t.json", minimal_transmission(0.25));
  fs::path outdir = cli.dir / "result";
  std::string out, err;
  REQUIRE(cli.run("run " + cfg.string() + " --out " + outdir.string(), &out, &err) == 0);

  nlohmann::json manifest = nlohmann::json::parse(read_text_file((outdir / "manifest.json").string()));
  CHECK(manifest["config"]["run"]["mode"] == "transmission");
  CHECK(manifest["solve_count"].get<int>() == 1);
  CHECK(manifest["solves"].size() == 1);
  CHECK(manifest.count("artifacts") == 1);

  MeshBundle b = parse_bundle(read_text_file((outdir / "transmission.txt").string()));
  REQUIRE(b.fields.size() == 1);
  CHECK(b.fields[0].name == "u");
  CHECK(b.fields[0].values.size() == b.mesh.nodes.size());
  CHECK(fs::exists(outdir / "heatmap.svg"));
  CHECK(fs::exists(outdir / "jump.svg"));

  // reruns into a fresh directory are byte-identical
  fs::path outdir2 = cli.dir / "result2";
  REQUIRE(cli.run("run " + cfg.string() + " --out " + outdir2.string(), &out, &err) == 0);
  for (const auto& entry : fs::directory_iterator(outdir)) {
    fs::path other = outdir2 / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(read_text_file(entry.path().string()) == read_text_file(other.string()));
  }
}

TEST_CASE("cli: output root resolution") {
  CliFixture cli;
  std::string cfg_text = minimal_transmission(0.25);
  // run.out defaults to "out" (relative): SIEVELAB_OUT supplies the root
  fs::path cfg = cli.write("t.json", cfg_text);
  std::string out, err;
  REQUIRE(cli.run("run " + cfg.string(), &out, &err,
                  "SIEVELAB_OUT=" + (cli.dir / "rooted").string()) == 0);
  CHECK(fs::exists(cli.dir / "rooted" / "out" / "manifest.json"));

  // --out wins over the environment
  REQUIRE(cli.run("run " + cfg.string() + " --out " + (cli.dir / "direct").string(), &out, &err,
                  "SIEVELAB_OUT=" + (cli.dir / "ignored").string()) == 0);
  CHECK(fs::exists(cli.dir / "direct" / "manifest.json"));
  CHECK_FALSE(fs::exists(cli.dir / "ignored"));
}

TEST_CASE("cli: runtime failures exit with 3") {
  CliFixture cli;
  // unresolvable sieve at the requested mesh size: walls thinner than h/2
  fs::path cfg = cli.write("g.json", R"json({
    "run": {"mode": "perforated", "h": 0.25, "js": [6]},
    "domain": {"xmin": -1, "xmax": 1, "ymin": 0, "ymax": 1},
    "interface": {"a": [0, 0], "b": [0, 1], "test_mode": true},
    "sieve": {"kind": "crack", "period": {"c": 1, "a": 0.693147180559945, "form": "exp"},
              "gap": {"c": 0.5, "a": 0.693147180559945, "form": "exp"}},
    "lower": {"h": "step(x)"}
  })json");
  std::string out, err;
  CHECK(cli.run("run " + cfg.string() + " --out " + (cli.dir / "boom").string(), &out, &err) == 3);
  CHECK(err.find("run failed:") != std::string::npos);
}
