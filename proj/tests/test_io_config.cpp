#include <filesystem>
#include <random>

#include <doctest.h>
#include <json.hpp>

#include "brokenpde/cli.hpp"
#include "brokenpde/config.hpp"
#include "brokenpde/errors.hpp"
#include "brokenpde/io.hpp"

using namespace brokenpde;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("brokenpde_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config_key(const std::string& text) {
  try {
    ExperimentConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "brokenpde");
  return cli::run(args);
}

}  // namespace

TEST_CASE("field CSV round trip is exact") {
  const fs::path dir = scratch("csv");
  const GridSpec g = GridSpec::square(-1, 1, 17);
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise;
  ScalarField f(g);
  for (auto& v : f.values()) v = noise(rng) * 1e-3;
  io::write_field_csv(dir / "f.csv", f);
  const ScalarField back = io::read_field_csv(dir / "f.csv");
  CHECK(back.grid() == g);
  CHECK(back.values() == f.values());

  const std::string text = io::read_text(dir / "f.csv");
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);

  const ScalarField line = sample(parse("x^3"), GridSpec::interval(0, 1, 11));
  io::write_field_csv(dir / "l.csv", line);
  CHECK(io::read_text(dir / "l.csv").rfind("x,value\n", 0) == 0);
  CHECK(io::read_field_csv(dir / "l.csv").values() == line.values());

  VectorField v(g);
  for (std::size_t k = 0; k < g.node_count(); ++k) v.x[k] = noise(rng), v.y[k] = noise(rng);
  io::write_vector_csv(dir / "v.csv", v);
  const VectorField vb = io::read_vector_csv(dir / "v.csv");
  CHECK(vb.x == v.x);
  CHECK(vb.y == v.y);

  io::write_text(dir / "bad.csv", "x,y,value\n0,0,1\n1,0,abc\n");
  CHECK_THROWS_AS(io::read_field_csv(dir / "bad.csv"), InvalidArgument);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = ExperimentConfig::parse(R"({
    "grid": {"dim": 2, "lo": [-1, -0.5], "hi": [1, 0.5], "n": [33, 17]},
    "coefficients": {"s": 0, "a_plus": "2+0.1*x", "a_minus": 1, "lambda": 0.4},
    "boundary": "x^2-y^2",
    "solver": {"tol_picard": 1e-9, "max_iterations": 50, "theta": 0.5},
    "analysis": {"z": [0.1, 0.2], "degree": 3, "rmin": 0.05, "rmax": 0.3, "steps": 5}
  })");
  CHECK(c.grid.n[1] == 17);
  CHECK(c.grid.lo[1] == -0.5);
  CHECK(c.model.a_plus.evaluate({1, 0}) == doctest::Approx(2.1));
  CHECK(c.model.a_minus.evaluate({}) == 1.0);
  CHECK(c.model.lambda == 0.4);
  CHECK(c.boundary.evaluate({2, 1}) == 3.0);
  CHECK(c.max_picard_iterations == 50);
  CHECK(c.analysis.z == Point{0.1, 0.2});
  CHECK(c.analysis.r_fit_or_default(c.grid) == doctest::Approx(8 * 1.0 / 16));
  const BrokenProblem p = c.problem();
  CHECK(p.theta == 0.5);
  CHECK(p.tol_picard == 1e-9);

  const ExperimentConfig s = ExperimentConfig::parse(
      R"({"grid": {"dim": 1, "n": 9}, "coefficients": {"s": 1, "a": 1, "b": "0.5"}, "boundary": "x"})");
  CHECK(s.grid.dim == 1);
  CHECK(s.model.b.evaluate({}) == 0.5);
}

TEST_CASE("config errors name the offending key") {
  const std::string base_grid = R"("grid": {"n": 9})";
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0, "b": 1}, "boundary": "x"})") ==
        "coefficients.b");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 1, "a_plus": 1}, "boundary": "x"})") ==
        "coefficients.a_plus");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0, "a_plus": "2*"}, "boundary": "x"})") ==
        "coefficients.a_plus");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0}, "boundary": "x", "extra": 1})") ==
        "extra");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0}, "boundary": "q"})") == "boundary");
  CHECK(config_key(R"({"grid": {"n": 9, "m": 3}, "coefficients": {"s": 0}, "boundary": "x"})") ==
        "grid.m");
  CHECK(config_key(R"({"grid": {"n": 2}, "coefficients": {"s": 0}, "boundary": "x"})") == "grid");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0}})") == "boundary");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0}, "boundary": "x", "solver": {"theta": 2}})") ==
        "solver");
  CHECK(config_key("{" + base_grid + R"(, "coefficients": {"s": 0}, "boundary": "x", "analysis": {"degree": 7}})") ==
        "analysis.degree");
  CHECK(config_key("not json") == "<document>");
}

TEST_CASE("cli exit codes, manifest and determinism") {
  const fs::path dir = scratch("cli");
  io::write_text(dir / "ok.json",
                 R"({"grid": {"n": 65}, "coefficients": {"s": 0, "a_plus": 2, "a_minus": 1}, "boundary": "x"})");
  io::write_text(dir / "bad.json",
                 R"({"grid": {"n": 33}, "coefficients": {"s": 0, "a": 2}, "boundary": "x"})");

  CHECK(run_cli({"solve", "--config", (dir / "ok.json").string(), "--out", (dir / "a").string()}) == 0);
  CHECK(run_cli({"solve", "--config", (dir / "ok.json").string(), "--out", (dir / "b").string()}) == 0);
  CHECK(io::read_text(dir / "a" / "u.csv") == io::read_text(dir / "b" / "u.csv"));

  const auto manifest = nlohmann::json::parse(io::read_text(dir / "a" / "manifest.json"));
  CHECK(manifest["version"] == cli::version());
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  CHECK(manifest.contains("wall_time_s"));

  CHECK(run_cli({"solve", "--config", (dir / "bad.json").string(), "--out", (dir / "c").string()}) == 2);
  CHECK(run_cli({"solve", "--config", (dir / "ok.json").string(), "--out", (dir / "d").string(),
                 "--max-iterations", "1"}) == 3);
  const auto report = nlohmann::json::parse(io::read_text(dir / "d" / "report.json"));
  CHECK(report["converged"] == false);
  CHECK(fs::exists(dir / "d" / "manifest.json"));

  CHECK(run_cli({"transform", "--config", (dir / "ok.json").string(), "--kind", "w", "--in",
                 (dir / "a" / "u.csv").string(), "--out", (dir / "t").string()}) == 0);
  CHECK(fs::exists(dir / "t" / "bvec.csv"));
  CHECK(run_cli({"nodal", "--config", (dir / "ok.json").string(), "--in",
                 (dir / "a" / "u.csv").string(), "--out", (dir / "n").string()}) == 0);
  CHECK(fs::exists(dir / "n" / "segments.csv"));
  CHECK(run_cli({"frequency", "--in", (dir / "t" / "v.csv").string(), "--bvec",
                 (dir / "t" / "bvec.csv").string(), "--c", (dir / "t" / "c.csv").string(), "--z", "-0.3,0",
                 "--out", (dir / "f").string()}) == 0);
  CHECK(io::read_text(dir / "f" / "frequency.csv").rfind("r,H,I,N,doubling\n", 0) == 0);
  CHECK(run_cli({"order", "--in", (dir / "a" / "u.csv").string(), "--z", "0,0", "--r-max", "0.6",
                 "--levels", "4", "--out", (dir / "o").string()}) == 0);
  CHECK(run_cli({"oracle-compare", "--config", (dir / "ok.json").string(), "--out",
                 (dir / "e").string()}) == 0);
  CHECK(run_cli({"verify", "--suite", "nonsense", "--out", (dir / "v").string()}) == 2);
  CHECK(run_cli({"solve"}) == 2);
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
