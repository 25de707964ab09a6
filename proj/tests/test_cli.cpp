#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "graphsde/config.hpp"
#include "graphsde/runner.hpp"
#include "graphsde/text.hpp"

using namespace graphsde;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"(# one edge with Robin coupling
[graph]
vertices = a b
edge = e1 a b length=1
M = -1 0  0 -1

[solver]
T = 0.1
dt = 1e-3
h = 0.25
seed = 7

[task]
name = validate
)";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("graphsde_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal config parses") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.graph.num_vertices() == 2);
  CHECK(cfg.graph.num_edges() == 1);
  CHECK(cfg.graph.edges[0].length == 1.0);
  CHECK(cfg.graph.coupling(0, 0) == -1.0);
  CHECK(cfg.solver.seed == 7);
  CHECK(cfg.mesh_h == 0.25);
  CHECK(cfg.task == Task::Validate);
  CHECK(cfg.reaction.trivial());
  CHECK(cfg.noise.trivial());
}

TEST_CASE("missing edge length names the field and the line") {
  const char* text = R"([graph]
vertices = a b
edge = e1 a b
M = -1 0 0 -1
)";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(ex.line() == 3);
    CHECK(std::string(ex.what()).find("length") != std::string::npos);
  }
}

TEST_CASE("coupling violations surface at the M line") {
  const char* text = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 1  1 -1
)";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(ex.line() == 4);
    CHECK(std::string(ex.what()).find("row_sum") != std::string::npos);
  }
  // lenient parsing defers the check
  ExperimentConfig cfg = parse_config(text, false);
  CHECK_FALSE(validate_graph(cfg.graph).valid());
}

TEST_CASE("row_sum_margin can relax the strictness check") {
  const char* zero_rows = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 1  1 -1
row_sum_margin = 0
)";
  ExperimentConfig cfg = parse_config(zero_rows);  // accepted at margin 0
  CHECK(cfg.validation.row_sum_margin == 0.0);
  CHECK(validate_graph(cfg.graph, cfg.validation).valid());
  CHECK_FALSE(validate_graph(cfg.graph).valid());  // default margin rejects
}

TEST_CASE("fhn preset expands to coefficients (0, -a, 1+a, -1)") {
  const char* text = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 0 0 -1

[reaction]
preset = fhn
a = 0.5
)";
  ExperimentConfig cfg = parse_config(text);
  REQUIRE(cfg.reaction.edges.size() == 1);
  const EdgeReaction& r = cfg.reaction.edges[0];
  CHECK(r.k == 1);
  CHECK(r.lower[0](0.0) == 0.0);
  CHECK(r.lower[1](0.0) == -0.5);
  CHECK(r.lower[2](0.0) == 1.5);
  CHECK(r.leading(0.0) == 1.0);  // eta^3 coefficient is -1
  for (double eta : {-1.0, 0.2, 0.7})
    CHECK(cfg.reaction.eval(0, 0.0, eta) ==
          doctest::Approx(eta * (eta - 1.0) * (0.5 - eta)).epsilon(1e-13));
}

TEST_CASE("unknown sections, keys and schemes are rejected") {
  CHECK_THROWS_AS(parse_config("[grpah]\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config("[graph]\nvertices = a b\nedge = e1 a b length=1 "
                   "weight=3\nM = -1 0 0 -1\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config("[graph]\nvertices = a b\nedge = e1 a b length=1\n"
                   "M = -1 0 0 -1\n\n[solver]\nscheme = euler\n"),
      ConfigError);
}

TEST_CASE("deterministic-cn with noise is a config error") {
  std::string text = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 0 0 -1

[noise]
sigma = 0.5

[solver]
scheme = deterministic-cn
)";
  CHECK_THROWS_AS(parse_config(text), ConfigError);
}

TEST_CASE("normalized config round-trips to the same normal form and hash") {
  const char* text = R"([graph]
vertices = a b c
edge = e1 a b length=1 c=poly:1,0.5 p=table:0:0.1,1:0.2
edge = e2 b c length=2 d=0.3
M = -2 1 0  1 -1.5 0  0 0 -1

[reaction]
preset = allen-cahn
beta = 1.25
modulation = per-path
modulation_range = 0.9 1.1

[noise]
kind = coloured
family = saturating
sigma = 0.4
mode = e1 amplitude=0.6 profile=poly:1,-1

[initial]
value = 0.5
edge = e2 poly:0,1

[solver]
T = 0.5
dt = 0.00025
h = 0.125
scheme = split-step
seed = 99
n_paths = 12
probes = e1:0.5 e2:1.5
output_stride = 4
moment_orders = 2 4

[task]
name = ensemble
)";
  ExperimentConfig cfg = parse_config(text);
  std::string norm = normalize_config(cfg);
  ExperimentConfig cfg2 = parse_config(norm);
  CHECK(normalize_config(cfg2) == norm);
  CHECK(config_hash(cfg2) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);

  // values that do not render exactly in few digits survive the round trip
  ExperimentConfig awkward = cfg;
  awkward.graph.edges[0].diffusion = Profile::constant(1.0 / 3.0);
  awkward.solver.dt = 1.0 / 3000.0;
  ExperimentConfig reparsed = parse_config(normalize_config(awkward));
  CHECK(reparsed.graph.edges[0].diffusion(0.5) == 1.0 / 3.0);
  CHECK(reparsed.solver.dt == awkward.solver.dt);
}

TEST_CASE("validate task reports and exits cleanly") {
  TempDir dir("validate");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  ResultBundle bundle = run_config_text(kMinimalConfig, opts);
  CHECK(bundle.exit_code == 0);
  bool saw_valid = false;
  for (const auto& [k, v] : bundle.summary)
    if (k == "valid") {
      saw_valid = true;
      CHECK(v == "true");
    }
  CHECK(saw_valid);

  // invalid matrix: still reports, exit code 2
  std::string bad = kMinimalConfig;
  const auto pos = bad.find("M = -1 0  0 -1");
  bad.replace(pos, 14, "M = -1 1  1 -1");
  TempDir dir2("validate_bad");
  RunOptions opts2;
  opts2.out_dir = dir2.path.string();
  ResultBundle b2 = run_config_text(bad, opts2);
  CHECK(b2.exit_code == 2);
  for (const auto& [k, v] : b2.summary)
    if (k == "valid") CHECK(v == "false");
}

TEST_CASE("spectrum task writes the eigenvalue table") {
  std::string text = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 0  0 -1

[solver]
h = 0.0078125

[task]
name = spectrum
count = 3
)";
  TempDir dir("spectrum");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  ResultBundle bundle = run_config_text(text, opts);
  REQUIRE(bundle.exit_code == 0);
  double leading = 0.0;
  for (const auto& [k, v] : bundle.summary)
    if (k == "leading_eigenvalue") leading = std::stod(v);
  CHECK(leading == doctest::Approx(-1.7070529).epsilon(1e-3));
  // first table row carries the leading eigenvalue
  std::ifstream in(dir.path / "spectrum.csv");
  std::string line;
  while (std::getline(in, line) && line.rfind("0,", 0) != 0) {
  }
  REQUIRE(line.rfind("0,", 0) == 0);
  CHECK(std::stod(line.substr(2)) == doctest::Approx(leading));
}

TEST_CASE("bundles are byte-identical across reruns and thread counts") {
  std::string text = R"([graph]
vertices = a b c
edge = e1 a b length=1
edge = e2 b c length=1
M = -1 0 0  0 -1 0  0 0 -1

[reaction]
preset = allen-cahn

[noise]
sigma = 0.3

[solver]
T = 0.05
dt = 1e-3
h = 0.1
seed = 31
n_paths = 8
probes = e1:0.5

[task]
name = ensemble
)";
  TempDir d1("bundle1"), d2("bundle2"), d3("bundle3");
  RunOptions o1, o2, o3;
  o1.out_dir = d1.path.string();
  o2.out_dir = d2.path.string();
  o3.out_dir = d3.path.string();
  o3.threads = 4;
  REQUIRE(run_config_text(text, o1).exit_code == 0);
  REQUIRE(run_config_text(text, o2).exit_code == 0);
  REQUIRE(run_config_text(text, o3).exit_code == 0);
  for (const char* name : {"summary.txt", "ensemble.csv",
                           "config_normalized.cfg"}) {
    const std::string a = read_file(d1.path / name);
    CHECK(a == read_file(d2.path / name));
    CHECK(a == read_file(d3.path / name));
    CHECK(a.find("# config_hash = ") != std::string::npos);
  }
  CHECK(verify_bundle(d1.path.string()));
}

TEST_CASE("verify_bundle flags a mismatched hash") {
  TempDir dir("tamper");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  REQUIRE(run_config_text(kMinimalConfig, opts).exit_code == 0);
  std::ofstream out(dir.path / "stray.csv", std::ios::binary);
  out << "# graphsde " << kToolVersion << "\n# config_hash = deadbeefdeadbeef\n";
  out.close();
  std::string err;
  CHECK_FALSE(verify_bundle(dir.path.string(), &err));
  CHECK(err.find("deadbeef") != std::string::npos);
}

TEST_CASE("task and seed overrides land in the normalized config") {
  TempDir dir("override");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  opts.task_override = "spectrum";
  opts.seed_override = 123;
  ResultBundle bundle = run_config_text(kMinimalConfig, opts);
  CHECK(bundle.exit_code == 0);
  const std::string norm = read_file(dir.path / "config_normalized.cfg");
  CHECK(norm.find("name = spectrum") != std::string::npos);
  CHECK(norm.find("seed = 123") != std::string::npos);
}

TEST_CASE("numerical failures are carried into the summary with code 3") {
  // lags longer than the probe series make the regularity fit impossible
  std::string text = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 0  0 -1

[noise]
sigma = 0.3

[solver]
T = 0.05
dt = 1e-3
h = 0.25
n_paths = 2
probes = e1:0.5

[task]
name = hoelder
lags = 64 128 256 512
)";
  TempDir dir("exit3");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  ResultBundle bundle = run_config_text(text, opts);
  CHECK(bundle.exit_code == 3);
  bool saw_error = false;
  for (const auto& [k, v] : bundle.summary)
    if (k == "error_code") {
      saw_error = true;
      CHECK(v == "3");
    }
  CHECK(saw_error);
}

TEST_CASE("ensemble blow-up rate exceeding the limit exits with code 4") {
  std::string text = R"([graph]
vertices = a b
edge = e1 a b length=1
M = -1 0  0 -1

[reaction]
preset = allen-cahn

[initial]
value = 10

[solver]
T = 8
dt = 0.5
h = 0.25
taming = 0
n_paths = 2
max_blowup_rate = 0

[task]
name = ensemble
)";
  TempDir dir("blowup");
  RunOptions opts;
  opts.out_dir = dir.path.string();
  ResultBundle bundle = run_config_text(text, opts);
  CHECK(bundle.exit_code == 4);
}
