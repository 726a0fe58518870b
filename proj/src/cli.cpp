#include "brokenpde/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "brokenpde/acceptance.hpp"
#include "brokenpde/analysis.hpp"
#include "brokenpde/config.hpp"
#include "brokenpde/errors.hpp"
#include "brokenpde/io.hpp"
#include "brokenpde/log.hpp"
#include "brokenpde/nodal.hpp"
#include "brokenpde/oracles.hpp"
#include "brokenpde/parallel.hpp"
#include "brokenpde/transforms.hpp"

#ifndef BROKENPDE_VERSION
#define BROKENPDE_VERSION "0.0.0"
#endif

namespace brokenpde::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* version() { return BROKENPDE_VERSION; }

namespace {

struct Options {
  std::uint64_t seed = 42;
  int threads = 1;

  std::string config;
  std::string out = ".";
  std::string in;
  std::string kind = "w";
  std::string z_text;
  std::optional<int> max_iterations;
  std::optional<double> r_fit;
  std::optional<double> r_max;
  std::optional<int> levels;
  std::optional<double> rmin, rmax;
  std::optional<int> steps;
  std::string u_path, bvec_path, c_path;
  std::string suite = "all";
};

/// Output directory, config text and timing shared by every subcommand.
class Session {
public:
  Session(std::string command, const Options& o) : command_(std::move(command)), opt_(o) {
    start_ = std::chrono::steady_clock::now();
  }

  ExperimentConfig load_config() {
    if (opt_.config.empty()) throw ConfigError("--config", "required for this subcommand");
    try {
      config_text_ = io::read_text(opt_.config);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--config", e.what());
    }
    return ExperimentConfig::parse(config_text_);
  }

  fs::path path(const std::string& name) const { return fs::path(opt_.out) / name; }

  void write_json(const std::string& name, const json& doc) const {
    io::write_text(path(name), doc.dump(2) + "\n");
  }

  void write_manifest(int exit_code) const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_json("manifest.json", {{"tool", "brokenpde"},
                                 {"version", version()},
                                 {"command", command_},
                                 {"config", opt_.config},
                                 {"config_hash", fmt::format("{:016x}", fnv1a(config_text_))},
                                 {"seed", opt_.seed},
                                 {"threads", opt_.threads},
                                 {"exit_code", exit_code},
                                 {"wall_time_s", wall}});
  }

private:
  std::string command_;
  const Options& opt_;
  std::string config_text_;
  std::chrono::steady_clock::time_point start_;
};

Point parse_point(const std::string& text, const std::string& flag) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError(flag, "expected x,y");
  try {
    std::size_t used = 0;
    const double x = std::stod(text.substr(0, comma), &used);
    const double y = std::stod(text.substr(comma + 1), &used);
    return {x, y};
  } catch (const std::logic_error&) {
    throw ConfigError(flag, "expected x,y");
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json solve_report_json(const SolveReport& r, double seconds) {
  return {{"converged", r.converged},
          {"picard_iterations", r.picard_iterations},
          {"update_history", r.update_history},
          {"final_nonlinear_residual", r.final_nonlinear_residual},
          {"final_theta", r.final_theta},
          {"cg_iterations", r.cg_iterations},
          {"wall_time_s", seconds}};
}

/// u from --in when given, otherwise a solve of the config problem.
ScalarField obtain_u(const ExperimentConfig& c, const Options& o) {
  if (!o.in.empty()) return io::read_field_csv(o.in);
  const SolveReport r = picard_solve(c.problem());
  if (!r.converged) {
    throw NoConvergence("Picard iteration did not converge", r.picard_iterations,
                        r.final_nonlinear_residual);
  }
  return r.u;
}

int cmd_solve(Session& s, const Options& o) {
  ExperimentConfig c = s.load_config();
  if (o.max_iterations) c.max_picard_iterations = *o.max_iterations;
  const BrokenProblem p = c.problem();
  const StructureReport structure = check_structure(p.model, p.grid, o.seed);
  for (const auto& flag : structure.flags) log().warn("structure: {}", flag);

  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport r = picard_solve(p);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  io::write_field_csv(s.path("u.csv"), r.u);
  json report = solve_report_json(r, seconds);
  report["structure_flags"] = structure.flags;
  s.write_json("report.json", report);
  if (!r.converged) {
    fmt::print(stderr, "error: Picard iteration did not converge after {} iterations (residual {:.3g})\n",
               r.picard_iterations, r.final_nonlinear_residual);
    return kNoConvergence;
  }
  return kOk;
}

int cmd_transform(Session& s, const Options& o) {
  const ExperimentConfig c = s.load_config();
  const Point z = o.z_text.empty() ? c.analysis.z : parse_point(o.z_text, "--z");
  const ScalarField u = obtain_u(c, o);
  if (o.kind == "freeze") {
    if (!c.model.is_heaviside()) throw ConfigError("--kind", "freeze needs s == 0");
    io::write_field_csv(s.path("v.csv"), phi_freeze(u, z, c.model));
  } else if (o.kind == "phi_s") {
    if (c.model.is_heaviside()) throw ConfigError("--kind", "phi_s needs s > 0");
    io::write_field_csv(s.path("v.csv"), phi_frozen(u, z, c.model));
  } else {
    const TransformFields tf = w_transform(u, c.model);
    io::write_field_csv(s.path("v.csv"), tf.v);
    io::write_vector_csv(s.path("bvec.csv"), tf.b_vec);
    io::write_field_csv(s.path("c.csv"), tf.c);
  }
  return kOk;
}

int cmd_nodal(Session& s, const Options& o) {
  const ExperimentConfig c = s.load_config();
  const ScalarField u = obtain_u(c, o);
  const AnalysisConfig& a = c.analysis;
  NodalSet ns = extract_nodal(u);
  const double r_fit = o.r_fit.value_or(a.r_fit_or_default(u.grid()));
  std::vector<NormalSample> normals;
  if (u.grid().dim == 2) {
    normals = nodal_normals(u, c.model, ns, r_fit, a.center, a.radius);
    io::write_segments_csv(s.path("segments.csv"), ns.segments);
    io::write_normals_csv(s.path("normals.csv"), normals);
  }
  const SignMeasures m = sign_measures(u, a.center, a.radius);
  json measures = {{"center", {a.center.x, a.center.y}},
                                 {"radius", a.radius},
                                 {"nodal_length", nodal_length(ns, a.center, a.radius)},
                                 {"total_length", ns.total_length()},
                                 {"segments", ns.segments.size()},
                                 {"points", ns.points.size()},
                                 {"normals", normals.size()},
                                 {"r_fit", r_fit},
                                 {"positive_measure", m.positive},
                                 {"negative_measure", m.negative},
                                 {"holder_modulus_alpha", c.model.alpha},
                                 {"holder_modulus", number_or_null(
                                      normals.size() >= 2
                                          ? holder_modulus(normals, c.model.alpha, 4.0 * r_fit)
                                          : std::nan(""))}};
  if (u.grid().dim == 1) {
    json points = json::array();
    for (const auto& p : ns.points) points.push_back(p.p.x);
    measures["sign_changes"] = points;
  }
  s.write_json("measures.json", measures);
  return kOk;
}

int cmd_order(Session& s, const Options& o) {
  if (o.in.empty()) throw ConfigError("--in", "required");
  std::optional<ExperimentConfig> c;
  if (!o.config.empty()) c = s.load_config();
  const ScalarField u = io::read_field_csv(o.in);
  const Point z = !o.z_text.empty() ? parse_point(o.z_text, "--z")
                                    : (c ? c->analysis.z : Point{0.0, 0.0});
  const double r_max = o.r_max.value_or(c ? c->analysis.r_max_or_default() : 0.4);
  const int levels = o.levels.value_or(c ? c->analysis.levels : 5);
  const OrderEstimate e = vanishing_order(u, z, r_max, levels);
  int order = 0;
  const PointClass cls = classify(e, &order);
  io::write_text(s.path("orders.csv"),
                 "x,y,d_hat,gap\n" + io::csv_row({z.x, z.y, e.d_hat, e.nearest_integer_gap}) + "\n");
  const char* names[] = {"unclassified", "nondegenerate", "degenerate", "unresolved"};
  s.write_json("order.json", {{"z", {z.x, z.y}},
                              {"radii", e.radii},
                              {"sups", e.sups},
                              {"d_hat", e.d_hat},
                              {"amplitude", e.amplitude},
                              {"nearest_integer_gap", e.nearest_integer_gap},
                              {"class", names[static_cast<int>(cls)]},
                              {"order", order}});
  return kOk;
}

int cmd_frequency(Session& s, const Options& o) {
  if (o.in.empty()) throw ConfigError("--in", "required");
  std::optional<ExperimentConfig> c;
  if (!o.config.empty()) c = s.load_config();
  const ScalarField w = io::read_field_csv(o.in);
  const Point z = !o.z_text.empty() ? parse_point(o.z_text, "--z")
                                    : (c ? c->analysis.z : Point{0.0, 0.0});
  const double rmin = o.rmin.value_or(c ? c->analysis.rmin : 0.1);
  const double rmax = o.rmax.value_or(c ? c->analysis.rmax : 0.4);
  const int steps = o.steps.value_or(c ? c->analysis.steps : 7);

  std::optional<FrequencyIntegrands> data;
  if (o.bvec_path.empty() && o.c_path.empty()) {
    data.emplace(w);
  } else {
    if (o.bvec_path.empty() || o.c_path.empty()) {
      throw ConfigError("--bvec", "--bvec and --c must be given together");
    }
    const VectorField b = io::read_vector_csv(o.bvec_path);
    const ScalarField cf = io::read_field_csv(o.c_path);
    const ScalarField q = o.u_path.empty() ? w : io::read_field_csv(o.u_path);
    if (!(b.grid == w.grid()) || !(cf.grid() == w.grid()) || !(q.grid() == w.grid())) {
      throw InvalidArgument("w, u, bvec and c must share one grid");
    }
    data.emplace(w, b, cf, q);
  }
  const FrequencyProfile prof = frequency_profile(*data, z, linspace(rmin, rmax, steps));
  std::string csv = "r,H,I,N,doubling\n";
  json flags = json::array();
  for (const auto& e : prof.entries) {
    csv += io::csv_row({e.r, e.H, e.I, e.N, e.doubling}) + "\n";
    if (!e.flag.empty()) flags.push_back({{"r", e.r}, {"flag", e.flag}});
  }
  io::write_text(s.path("frequency.csv"), csv);
  s.write_json("frequency.json", {{"z", {z.x, z.y}},
                                  {"max_N", number_or_null(prof.max_N())},
                                  {"degenerate_h", prof.any_degenerate()},
                                  {"flags", flags}});
  return kOk;
}

int cmd_oracle_compare(Session& s) {
  const ExperimentConfig c = s.load_config();
  const BrokenProblem p = c.problem();
  const SolveReport r = picard_solve(p);
  if (!r.converged) {
    throw NoConvergence("Picard iteration did not converge", r.picard_iterations,
                        r.final_nonlinear_residual);
  }
  const GridSpec& g = p.grid;
  json out;
  ScalarField exact;
  if (g.dim == 1) {
    if (!c.model.is_heaviside() || !c.model.a_plus.is_constant() || !c.model.a_minus.is_constant()) {
      throw ConfigError("coefficients", "1D oracle needs s == 0 with constant a_plus, a_minus");
    }
    const OracleSolution oracle =
        transmission_1d(c.model.a_plus.evaluate({}), c.model.a_minus.evaluate({}),
                        p.boundary.evaluate({g.lo[0], 0.0}), p.boundary.evaluate({g.hi[0], 0.0}),
                        g.lo[0], g.hi[0]);
    exact = sample(oracle.field, g);
    const NodalSet ns = extract_nodal(r.u);
    out["interface_exact"] = oracle.interface;
    if (ns.points.size() == 1) {
      out["interface"] = ns.points.front().p.x;
      out["interface_offset"] = std::abs(ns.points.front().p.x - oracle.interface);
    } else {
      out["interface"] = nullptr;
      out["interface_offset"] = nullptr;
    }
    out["oracle"] = oracle.kind;
  } else {
    const OracleSolution oracle = harmonic_inversion_exact(c.model, p.boundary, g, p.tol_cg);
    exact = oracle.nodal;
    out["oracle"] = oracle.kind;
  }
  double sup = 0.0, sum = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double d = r.u[k] - exact[k];
    sup = std::max(sup, std::abs(d));
    sum += d * d;
  }
  const double cell = g.h(0) * (g.dim == 2 ? g.h(1) : 1.0);
  out["sup_error"] = sup;
  out["l2_error"] = std::sqrt(sum * cell);
  out["h"] = g.min_spacing();
  out["picard_iterations"] = r.picard_iterations;
  s.write_json("error.json", out);
  return kOk;
}

int cmd_verify(Session& s, const Options& o) {
  AcceptanceSuite suite(o.seed);
  std::vector<CriterionResult> results;
  const auto ids = [&] {
    try {
      return AcceptanceSuite::ids_for(o.suite);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--suite", e.what());
    }
  }();
  bool all = true;
  for (const auto& id : ids) {
    results.push_back(suite.run(id));
    const auto& r = results.back();
    all = all && r.passed;
    fmt::print("{} {} {}: {}\n", r.id, r.passed ? "PASS" : "FAIL", r.title, r.summary);
  }
  s.write_json("report.json", suite_report(results));
  return all ? kOk : kAcceptanceFailed;
}

}  // namespace

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"Numerical experiments for elliptic equations with solution-dependent broken coefficients",
               "brokenpde"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Seed for randomized sweeps")->capture_default_str();
  app.add_option("--threads", o.threads, "Maximum worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve", "Solve the broken problem; writes u.csv, report.json");
  solve->add_option("--config", o.config)->required();
  solve->add_option("--out", o.out)->capture_default_str();
  solve->add_option("--max-iterations", o.max_iterations, "Override solver.max_iterations");

  auto* transform = app.add_subcommand("transform", "Change of variable; writes v.csv (and bvec.csv, c.csv for w)");
  transform->add_option("--config", o.config)->required();
  transform->add_option("--kind", o.kind)->check(CLI::IsMember({"freeze", "w", "phi_s"}))->capture_default_str();
  transform->add_option("--z", o.z_text, "Freezing point x,y");
  transform->add_option("--in", o.in, "u.csv to transform instead of solving");
  transform->add_option("--out", o.out)->capture_default_str();

  auto* nodal = app.add_subcommand("nodal", "Nodal set; writes segments.csv, normals.csv, measures.json");
  nodal->add_option("--config", o.config)->required();
  nodal->add_option("--in", o.in, "u.csv (solves the config problem when omitted)");
  nodal->add_option("--r-fit", o.r_fit, "Normal fit radius (default 8h)");
  nodal->add_option("--out", o.out)->capture_default_str();

  auto* order = app.add_subcommand("order", "Vanishing order at a point; writes orders.csv");
  order->add_option("--in", o.in)->required();
  order->add_option("--config", o.config);
  order->add_option("--z", o.z_text);
  order->add_option("--r-max", o.r_max);
  order->add_option("--levels", o.levels);
  order->add_option("--out", o.out)->capture_default_str();

  auto* frequency = app.add_subcommand("frequency", "Frequency profile; writes frequency.csv");
  frequency->add_option("--in", o.in, "w.csv")->required();
  frequency->add_option("--u", o.u_path, "Field coupled to the lower-order terms (default w)");
  frequency->add_option("--bvec", o.bvec_path);
  frequency->add_option("--c", o.c_path);
  frequency->add_option("--config", o.config);
  frequency->add_option("--z", o.z_text);
  frequency->add_option("--rmin", o.rmin);
  frequency->add_option("--rmax", o.rmax);
  frequency->add_option("--steps", o.steps);
  frequency->add_option("--out", o.out)->capture_default_str();

  auto* oracle = app.add_subcommand("oracle-compare", "Solver against the exact oracle; writes error.json");
  oracle->add_option("--config", o.config)->required();
  oracle->add_option("--out", o.out)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run acceptance experiments; writes report.json");
  verify->add_option("--suite", o.suite, "all, constant-coeff, frequency, nodal, transforms or AC-<k>")
      ->capture_default_str();
  verify->add_option("--out", o.out)->capture_default_str();

  try {
    std::vector<std::string> rest;
    if (!args.empty()) rest.assign(args.rbegin(), args.rend() - 1);
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  set_max_threads(o.threads);
  CLI::App* sub = app.get_subcommands().front();
  Session session(sub->get_name(), o);
  int code = kOk;
  try {
    if (sub == solve) code = cmd_solve(session, o);
    else if (sub == transform) code = cmd_transform(session, o);
    else if (sub == nodal) code = cmd_nodal(session, o);
    else if (sub == order) code = cmd_order(session, o);
    else if (sub == frequency) code = cmd_frequency(session, o);
    else if (sub == oracle) code = cmd_oracle_compare(session);
    else code = cmd_verify(session, o);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    code = kConfigError;
  } catch (const WrongRegime& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    code = kConfigError;
  } catch (const NoConvergence& e) {
    fmt::print(stderr, "error: {} (iterations {}, residual {:.3g})\n", e.what(), e.iterations(),
               e.residual());
    code = kNoConvergence;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    code = kFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    code = kFailure;
  }
  try {
    session.write_manifest(code);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: cannot write manifest: {}\n", e.what());
  }
  return code;
}

}  // namespace brokenpde::cli
