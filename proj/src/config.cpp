#include "brokenpde/config.hpp"

#include <set>

#include <json.hpp>

#include "brokenpde/errors.hpp"
#include "brokenpde/io.hpp"

namespace brokenpde {

namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

const json& require_object(const json& root, const std::string& key) {
  if (!root.contains(key)) throw ConfigError(key, "missing section");
  const json& v = root.at(key);
  if (!v.is_object()) throw ConfigError(key, "expected an object");
  return v;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

/// A number or a two-element array.
std::array<double, 2> pair_of(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(key, "expected a number or a pair of numbers");
}

Point point_of(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(key, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::string expression_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return io::format_double(v.get<double>());
  throw ConfigError(key, "expected an expression string or a number");
}

Expr expression(const json& v, const std::string& key) {
  const std::string text = expression_text(v, key);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

GridSpec parse_grid(const json& s) {
  reject_unknown(s, "grid.", {"dim", "lo", "hi", "n"});
  GridSpec g;
  g.dim = s.contains("dim") ? integer(s.at("dim"), "grid.dim") : 2;
  if (g.dim != 1 && g.dim != 2) throw ConfigError("grid.dim", "must be 1 or 2");
  const auto lo = s.contains("lo") ? pair_of(s.at("lo"), "grid.lo") : std::array<double, 2>{-1, -1};
  const auto hi = s.contains("hi") ? pair_of(s.at("hi"), "grid.hi") : std::array<double, 2>{1, 1};
  if (!s.contains("n")) throw ConfigError("grid.n", "missing");
  const json& n = s.at("n");
  std::array<int, 2> counts{};
  if (n.is_number_integer()) {
    counts = {n.get<int>(), n.get<int>()};
  } else if (n.is_array() && n.size() == 2 && n[0].is_number_integer() && n[1].is_number_integer()) {
    counts = {n[0].get<int>(), n[1].get<int>()};
  } else {
    throw ConfigError("grid.n", "expected an integer or a pair of integers");
  }
  g.lo = lo;
  g.hi = hi;
  g.n = counts;
  if (g.dim == 1) {
    g.lo[1] = g.hi[1] = 0.0;
    g.n[1] = 1;
  }
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("grid", e.what());
  }
  return g;
}

CoefficientModel parse_coefficients(const json& s) {
  reject_unknown(s, "coefficients.",
                 {"s", "a_plus", "a_minus", "a", "b", "f_x", "f_y", "lambda", "alpha", "omega0"});
  CoefficientModel m;
  m.s = s.contains("s") ? number(s.at("s"), "coefficients.s") : 0.0;
  if (m.s < 0.0) throw ConfigError("coefficients.s", "must be >= 0");
  const bool heaviside = m.s == 0.0;
  for (const char* key : {"a", "b"}) {
    if (heaviside && s.contains(key)) {
      throw ConfigError(std::string("coefficients.") + key, "only valid when s > 0");
    }
  }
  for (const char* key : {"a_plus", "a_minus"}) {
    if (!heaviside && s.contains(key)) {
      throw ConfigError(std::string("coefficients.") + key, "only valid when s == 0");
    }
  }
  auto expr_or = [&](const char* key, Expr fallback) {
    return s.contains(key) ? expression(s.at(key), std::string("coefficients.") + key) : fallback;
  };
  if (heaviside) {
    m.a_plus = expr_or("a_plus", Expr::constant(1.0));
    m.a_minus = expr_or("a_minus", Expr::constant(1.0));
  } else {
    m.a = expr_or("a", Expr::constant(1.0));
    m.b = expr_or("b", Expr::constant(0.0));
  }
  m.f_x = expr_or("f_x", Expr::constant(0.0));
  m.f_y = expr_or("f_y", Expr::constant(0.0));
  if (s.contains("lambda")) m.lambda = number(s.at("lambda"), "coefficients.lambda");
  if (s.contains("alpha")) m.alpha = number(s.at("alpha"), "coefficients.alpha");
  if (s.contains("omega0")) m.omega0 = number(s.at("omega0"), "coefficients.omega0");
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("coefficients", e.what());
  }
  return m;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "expected a JSON object");
  reject_unknown(root, "", {"grid", "coefficients", "boundary", "solver", "analysis"});

  ExperimentConfig c;
  c.grid = parse_grid(require_object(root, "grid"));
  c.model = parse_coefficients(require_object(root, "coefficients"));
  if (!root.contains("boundary")) throw ConfigError("boundary", "missing");
  c.boundary_text = expression_text(root.at("boundary"), "boundary");
  c.boundary = expression(root.at("boundary"), "boundary");

  if (root.contains("solver")) {
    const json& s = require_object(root, "solver");
    reject_unknown(s, "solver.",
                   {"tol_picard", "max_iterations", "theta", "tol_cg", "max_cg_iterations"});
    if (s.contains("tol_picard")) c.tol_picard = number(s.at("tol_picard"), "solver.tol_picard");
    if (s.contains("max_iterations")) {
      c.max_picard_iterations = integer(s.at("max_iterations"), "solver.max_iterations");
    }
    if (s.contains("theta")) c.theta = number(s.at("theta"), "solver.theta");
    if (s.contains("tol_cg")) c.tol_cg = number(s.at("tol_cg"), "solver.tol_cg");
    if (s.contains("max_cg_iterations")) {
      c.max_cg_iterations = integer(s.at("max_cg_iterations"), "solver.max_cg_iterations");
    }
  }

  if (root.contains("analysis")) {
    const json& s = require_object(root, "analysis");
    reject_unknown(s, "analysis.",
                   {"z", "r_fit", "r_max", "levels", "degree", "rmin", "rmax", "steps", "center",
                    "radius"});
    AnalysisConfig& a = c.analysis;
    if (s.contains("z")) a.z = point_of(s.at("z"), "analysis.z");
    if (s.contains("r_fit")) a.r_fit = number(s.at("r_fit"), "analysis.r_fit");
    if (s.contains("r_max")) a.r_max = number(s.at("r_max"), "analysis.r_max");
    if (s.contains("levels")) a.levels = integer(s.at("levels"), "analysis.levels");
    if (s.contains("degree")) a.degree = integer(s.at("degree"), "analysis.degree");
    if (s.contains("rmin")) a.rmin = number(s.at("rmin"), "analysis.rmin");
    if (s.contains("rmax")) a.rmax = number(s.at("rmax"), "analysis.rmax");
    if (s.contains("steps")) a.steps = integer(s.at("steps"), "analysis.steps");
    if (s.contains("center")) a.center = point_of(s.at("center"), "analysis.center");
    if (s.contains("radius")) a.radius = number(s.at("radius"), "analysis.radius");
    if (a.degree < 1 || a.degree > 4) throw ConfigError("analysis.degree", "must be in 1..4");
    if (a.steps < 1) throw ConfigError("analysis.steps", "must be positive");
    if (!(a.rmin > 0.0 && a.rmax >= a.rmin)) throw ConfigError("analysis.rmin", "need 0 < rmin <= rmax");
  }

  try {
    c.problem().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("solver", e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const InvalidArgument& e) {
    throw ConfigError("<file>", e.what());
  }
  return parse(text);
}

BrokenProblem ExperimentConfig::problem() const {
  BrokenProblem p;
  p.grid = grid;
  p.model = model;
  p.boundary = boundary;
  p.tol_picard = tol_picard;
  p.max_picard_iterations = max_picard_iterations;
  p.theta = theta;
  p.tol_cg = tol_cg;
  p.max_cg_iterations = max_cg_iterations;
  return p;
}

}  // namespace brokenpde
