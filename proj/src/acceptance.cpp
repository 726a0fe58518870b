#include "brokenpde/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "brokenpde/analysis.hpp"
#include "brokenpde/errors.hpp"
#include "brokenpde/log.hpp"
#include "brokenpde/nodal.hpp"
#include "brokenpde/oracles.hpp"
#include "brokenpde/transforms.hpp"

namespace brokenpde {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

// Coefficients of the Hoelder experiment and the C^{1,1} frequency experiment.
constexpr const char* kHolderAPlus = "1.5+0.25*((x+1.2)^2)^{0.25}";
constexpr const char* kSmoothAPlus = "2+0.2*x^2";
constexpr const char* kSmoothAMinus = "1+0.1*y^2";
// phi^{-1}(x^2 - y^2) for a_plus = 2, a_minus = 1: its transform is harmonic
// and vanishes to second order at the origin.
constexpr const char* kSaddleInverse = "max(x^2-y^2,0)/2+min(x^2-y^2,0)";

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BrokenProblem heaviside_problem(const std::string& a_plus, const std::string& a_minus,
                                const std::string& g, int n, int dim = 2) {
  BrokenProblem p;
  p.grid = dim == 2 ? GridSpec::square(-1.0, 1.0, n) : GridSpec::interval(-1.0, 1.0, n);
  p.model = CoefficientModel::heaviside(parse(a_plus), parse(a_minus));
  p.boundary = parse(g);
  return p;
}

BrokenProblem power_problem(double s, const std::string& a, const std::string& b,
                            const std::string& g, int n) {
  BrokenProblem p;
  p.grid = GridSpec::square(-1.0, 1.0, n);
  p.model = CoefficientModel::power(s, parse(a), parse(b));
  p.boundary = parse(g);
  return p;
}

double sup_difference(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double l2_difference(const ScalarField& a, const ScalarField& b) {
  const GridSpec& g = a.grid();
  double cell = g.h(0) * (g.dim == 2 ? g.h(1) : 1.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum * cell);
}

/// max over cells with a sign change and centre in B(center, radius) of the
/// cell-centre gradient of the bilinear interpolant.
double max_gradient_near_nodal(const ScalarField& u, Point center, double radius) {
  const GridSpec& g = u.grid();
  const double hx = g.h(0);
  const double hy = g.h(1);
  double m = 0.0;
  for (int j = 0; j + 1 < g.n[1]; ++j) {
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      const double v00 = u(i, j), v10 = u(i + 1, j), v11 = u(i + 1, j + 1), v01 = u(i, j + 1);
      const int npos = (v00 > 0) + (v10 > 0) + (v11 > 0) + (v01 > 0);
      if (npos == 0 || npos == 4) continue;
      const Point mid = g.node(i, j) + Point{0.5 * hx, 0.5 * hy};
      if (distance(mid, center) > radius) continue;
      const double gx = 0.5 * ((v10 - v00) + (v11 - v01)) / hx;
      const double gy = 0.5 * ((v01 - v00) + (v11 - v10)) / hy;
      m = std::max(m, std::hypot(gx, gy));
    }
  }
  return m;
}

/// The zero of u along the row y = 0 closest to x = 0, by linear interpolation.
Point axis_crossing(const ScalarField& u) {
  const GridSpec& g = u.grid();
  const int j = (g.n[1] - 1) / 2;
  std::optional<Point> best;
  for (int i = 0; i + 1 < g.n[0]; ++i) {
    const double a = u(i, j), b = u(i + 1, j);
    if ((a > 0) == (b > 0)) continue;
    const double t = a / (a - b);
    const Point p{g.node(i, j).x + t * g.h(0), g.node(i, j).y};
    if (!best || std::abs(p.x) < std::abs(best->x)) best = p;
  }
  if (!best) throw NoSignChange("u does not change sign along y = 0");
  return *best;
}

/// Relative spread |a - b| / |b|.
double rel_change(double coarse, double fine) {
  return std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
}

json history(const SolveRun& r) {
  return {{"n", r.problem.grid.n[0]},
          {"picard_iterations", r.report.picard_iterations},
          {"converged", r.report.converged},
          {"residual", r.report.final_nonlinear_residual},
          {"seconds", r.seconds}};
}

std::string verdict(bool ok) { return ok ? "pass" : "fail"; }

}  // namespace

AcceptanceSuite::AcceptanceSuite(std::uint64_t seed) : seed_(seed) {}

const std::vector<std::string>& AcceptanceSuite::all_ids() {
  static const std::vector<std::string> ids{"AC-1", "AC-2", "AC-3", "AC-4", "AC-5",
                                            "AC-6", "AC-7", "AC-8", "AC-9"};
  return ids;
}

std::vector<std::string> AcceptanceSuite::ids_for(const std::string& suite) {
  if (suite == "all") return all_ids();
  if (suite == "constant-coeff") return {"AC-1", "AC-2", "AC-3"};
  if (suite == "frequency") return {"AC-3", "AC-7"};
  if (suite == "nodal") return {"AC-4", "AC-5", "AC-6", "AC-9"};
  if (suite == "transforms") return {"AC-8"};
  const auto& ids = all_ids();
  if (std::find(ids.begin(), ids.end(), suite) != ids.end()) return {suite};
  throw InvalidArgument("unknown suite '" + suite + "'");
}

const SolveRun& AcceptanceSuite::solve(const std::string& name, const BrokenProblem& p) {
  auto it = runs_.find(name);
  if (it != runs_.end()) return *it->second;
  auto run = std::make_unique<SolveRun>();
  run->problem = p;
  const auto t0 = Clock::now();
  run->report = picard_solve(p);
  run->seconds = seconds_since(t0);
  log().info("solve {}: {} iterations, residual {:.3g}, {:.2f} s", name,
             run->report.picard_iterations, run->report.final_nonlinear_residual, run->seconds);
  return *runs_.emplace(name, std::move(run)).first->second;
}

CriterionResult AcceptanceSuite::run(const std::string& id) {
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    if (id == "AC-1") r = ac1();
    else if (id == "AC-2") r = ac2();
    else if (id == "AC-3") r = ac3();
    else if (id == "AC-4") r = ac4();
    else if (id == "AC-5") r = ac5();
    else if (id == "AC-6") r = ac6();
    else if (id == "AC-7") r = ac7();
    else if (id == "AC-8") r = ac8();
    else if (id == "AC-9") r = ac9();
    else throw InvalidArgument("unknown criterion '" + id + "'");
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& e) {
    r.passed = false;
    r.summary = fmt::format("error: {}", e.what());
    r.details = {{"error", e.what()}};
  }
  r.id = id;
  r.seconds = seconds_since(t0);
  return r;
}

// 1D transmission problem against the piecewise-linear solution.
CriterionResult AcceptanceSuite::ac1() {
  CriterionResult r;
  r.title = "1D oracle equivalence";
  const auto t0 = Clock::now();
  const SolveRun& run = solve("ac1", heaviside_problem("2", "1", "x", 129, 1));
  const OracleSolution oracle = transmission_1d(2.0, 1.0, -1.0, 1.0);
  const ScalarField& u = run.report.u;
  const GridSpec& g = u.grid();
  const double h = g.h(0);

  const NodalSet ns = extract_nodal(u);
  if (ns.points.size() != 1) throw NoSignChange("expected exactly one sign change");
  const double x0 = ns.points.front().p.x;
  const double offset = std::abs(x0 - oracle.interface);

  // least-squares slopes over nodes at least 2h from the interface
  auto slope = [&](bool left) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int i = 0; i < g.n[0]; ++i) {
      const double x = g.node(i).x;
      if (left ? x > x0 - 2 * h : x < x0 + 2 * h) continue;
      sx += x;
      sy += u(i);
      sxx += x * x;
      sxy += x * u(i);
      ++count;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
  };
  const double slope_minus = slope(true);
  const double slope_plus = slope(false);
  const double err_minus = std::abs(slope_minus - oracle.slope_minus) / oracle.slope_minus;
  const double err_plus = std::abs(slope_plus - oracle.slope_plus) / oracle.slope_plus;
  const double sup = sup_difference(u, sample(oracle.field, g));
  const double elapsed = seconds_since(t0);

  r.passed = run.report.converged && offset <= 2 * h && err_minus <= 0.05 && err_plus <= 0.05 &&
             sup <= 3 * h && elapsed < 1.0;
  r.summary = fmt::format(
      "x0={:.6f} (exact {:.6f}, offset {:.2g}h), slope errors {:.2g}%/{:.2g}%, sup {:.2g}h, {:.2f}s",
      x0, oracle.interface, offset / h, 100 * err_minus, 100 * err_plus, sup / h, elapsed);
  r.details = {{"h", h},
               {"interface", x0},
               {"interface_exact", oracle.interface},
               {"interface_offset", offset},
               {"slope_minus", slope_minus},
               {"slope_plus", slope_plus},
               {"slope_minus_exact", oracle.slope_minus},
               {"slope_plus_exact", oracle.slope_plus},
               {"sup_error", sup},
               {"runtime_s", elapsed},
               {"solve", history(run)}};
  return r;
}

// 2D oracle comparison for s = 0 and s = 1 on two grids.
CriterionResult AcceptanceSuite::ac2() {
  CriterionResult r;
  r.title = "2D oracle equivalence";
  r.passed = true;
  json cases = json::array();
  std::string summary;
  for (int regime = 0; regime < 2; ++regime) {
    const auto t0 = Clock::now();
    double errors[2] = {0, 0};
    json grids = json::array();
    bool ok = true;
    const int ns[2] = {65, 129};
    for (int k = 0; k < 2; ++k) {
      const int n = ns[k];
      const BrokenProblem p = regime == 0 ? heaviside_problem("2", "1", "x", n)
                                          : power_problem(1.0, "1", "1", "x", n);
      const SolveRun& run = solve(fmt::format("ac2_s{}_n{}", regime, n), p);
      const OracleSolution oracle = harmonic_inversion_exact(p.model, p.boundary, p.grid);
      const double h = p.grid.h(0);
      errors[k] = sup_difference(run.report.u, oracle.nodal);
      const bool grid_ok = run.report.converged && errors[k] <= 3 * h;
      ok = ok && grid_ok;
      grids.push_back({{"n", n},
                       {"h", h},
                       {"sup_error", errors[k]},
                       {"l2_error", l2_difference(run.report.u, oracle.nodal)},
                       {"solve", history(run)}});
    }
    const double ratio = errors[0] / errors[1];
    const double elapsed = seconds_since(t0);
    ok = ok && ratio >= 1.7 && elapsed < 30.0;
    r.passed = r.passed && ok;
    cases.push_back({{"s", regime}, {"grids", grids}, {"error_ratio", ratio},
                     {"runtime_s", elapsed}, {"pass", ok}});
    summary += fmt::format("{}s={}: errors {:.3g}/{:.3g}, ratio {:.2f}", summary.empty() ? "" : "; ",
                           regime, errors[0], errors[1], ratio);
  }
  r.summary = summary;
  r.details = {{"cases", cases}};
  return r;
}

// Frequency and doubling of homogeneous harmonics.
CriterionResult AcceptanceSuite::ac3() {
  CriterionResult r;
  r.title = "frequency ground truth";
  const auto t0 = Clock::now();
  const GridSpec g = GridSpec::square(-1.0, 1.0, 257);
  const std::vector<double> radii = linspace(0.1, 0.4, 7);
  r.passed = true;
  json cases = json::array();
  std::string summary;
  for (int d = 1; d <= 2; ++d) {
    const ScalarField w = sample(parse(d == 1 ? "x" : "x^2-y^2"), g);
    const FrequencyProfile prof = frequency_profile(FrequencyIntegrands(w), {0, 0}, radii);
    const double target_doubling = std::pow(2.0, 1 + 2 * d);
    double worst_n = 0.0, worst_doubling = 0.0;
    json entries = json::array();
    bool ok = !prof.any_degenerate();
    for (const auto& e : prof.entries) {
      worst_n = std::max(worst_n, std::abs(e.N - d));
      ok = ok && std::abs(e.N - d) <= 0.03;
      if (std::isfinite(e.doubling)) {
        const double rel = std::abs(e.doubling - target_doubling) / target_doubling;
        worst_doubling = std::max(worst_doubling, rel);
        ok = ok && rel <= 0.03;
      }
      entries.push_back({{"r", e.r}, {"N", e.N}, {"doubling", e.doubling}});
    }
    r.passed = r.passed && ok;
    cases.push_back({{"degree", d}, {"max_N_error", worst_n}, {"max_doubling_rel_error", worst_doubling},
                     {"profile", entries}});
    summary += fmt::format("{}d={}: |N-d|<={:.2g}, doubling off {:.2g}%", summary.empty() ? "" : "; ",
                           d, worst_n, 100 * worst_doubling);
  }
  const double elapsed = seconds_since(t0);
  r.passed = r.passed && elapsed < 10.0;
  r.summary = summary + fmt::format(", {:.2f}s", elapsed);
  r.details = {{"cases", cases}, {"runtime_s", elapsed}};
  return r;
}

// Lipschitz bound and Hoelder continuity of the normal under refinement.
CriterionResult AcceptanceSuite::ac4() {
  CriterionResult r;
  r.title = "Lipschitz bound and C^{1,alpha} nodal set";
  const auto t0 = Clock::now();
  const int ns[3] = {65, 129, 257};
  double grad[3], holder[3];
  json grids = json::array();
  bool converged = true;
  for (int k = 0; k < 3; ++k) {
    BrokenProblem p = heaviside_problem(kHolderAPlus, "1", "x", ns[k]);
    const SolveRun& run = solve(fmt::format("ac4_n{}", ns[k]), p);
    converged = converged && run.report.converged;
    const ScalarField& u = run.report.u;
    // Interior window: where the nodal set meets the Dirichlet boundary at
    // (0, +-1) the gradient carries a corner singularity that grows with n.
    grad[k] = max_gradient_near_nodal(u, {0.0, 0.0}, 0.8);
    const NodalSet nodal = extract_nodal(u);
    const double r_fit = 8.0 * p.grid.min_spacing();
    const auto normals = nodal_normals(u, p.model, nodal, r_fit, {0.0, 0.0}, 0.8);
    holder[k] = holder_modulus(normals, 0.5, 0.05);
    grids.push_back({{"n", ns[k]},
                     {"max_grad_near_nodal", grad[k]},
                     {"max_grad_near_nodal_whole_grid",
                      max_gradient_near_nodal(u, {0.0, 0.0}, std::numeric_limits<double>::infinity())},
                     {"normals", normals.size()},
                     {"holder_modulus", holder[k]},
                     {"solve", history(run)}});
  }
  const double growth1 = grad[1] / grad[0] - 1.0;
  const double growth2 = grad[2] / grad[1] - 1.0;
  const double holder_change = rel_change(holder[1], holder[2]);
  const double elapsed = seconds_since(t0);
  const bool lipschitz = growth1 <= 0.10 && growth2 <= 0.10;
  const bool holder_ok = std::isfinite(holder[2]) && holder[2] > 0 && holder_change <= 0.20;
  r.passed = converged && lipschitz && holder_ok && elapsed < 120.0;
  r.summary = fmt::format(
      "max|grad u| {:.4f}/{:.4f}/{:.4f} (growth {:+.1f}%, {:+.1f}%), holder {:.4f}/{:.4f}/{:.4f} "
      "(last change {:.1f}%), {:.1f}s",
      grad[0], grad[1], grad[2], 100 * growth1, 100 * growth2, holder[0], holder[1], holder[2],
      100 * holder_change, elapsed);
  r.details = {{"grids", grids},
               {"gradient_growth", {growth1, growth2}},
               {"holder_last_change", holder_change},
               {"runtime_s", elapsed}};
  return r;
}

// Vanishing order at the origin for the saddle boundary data.
CriterionResult AcceptanceSuite::ac5() {
  CriterionResult r;
  r.title = "integer vanishing order";
  const auto t0 = Clock::now();

  auto measure = [&](const std::string& name, const std::string& g_text, json& out) {
    const BrokenProblem p = heaviside_problem("2", "1", g_text, 257);
    const SolveRun& run = solve(name, p);
    const ScalarField& u = run.report.u;
    const Point z{0.0, 0.0};
    const OrderEstimate est = vanishing_order(u, z, 0.4, 5);
    const PolyFit fit = harmonic_fit(phi_freeze(u, z, p.model), z, 2, 0.4);
    out = {{"boundary", g_text},
           {"u_at_origin", interpolate(u, z)},
           {"d_hat", est.d_hat},
           {"nearest_integer_gap", est.nearest_integer_gap},
           {"radii", est.radii},
           {"sups", est.sups},
           {"fit_re", fit.re},
           {"fit_im", fit.im},
           {"fit_radii", fit.radii},
           {"fit_residuals", fit.residuals},
           {"decay_exponent", fit.decay_exponent},
           {"ill_conditioned", fit.ill_conditioned},
           {"solve", history(run)}};
    return std::pair{est.d_hat, fit.decay_exponent};
  };

  json main, supplementary;
  const auto [d_hat, decay] = measure("ac5_n257", "x^2-y^2", main);
  const double elapsed = seconds_since(t0);
  const bool converged = main["solve"]["converged"].get<bool>();
  r.passed = converged && std::abs(d_hat - 2.0) <= 0.1 && decay >= 2.3 && elapsed < 60.0;

  // Not part of the verdict: the same measurement where the origin really is
  // a second-order zero of u.
  const auto [d_sup, decay_sup] = measure("ac5_inverse_n257", kSaddleInverse, supplementary);

  r.summary = fmt::format(
      "u(0)={:.4f}, d_hat={:.3f}, decay={:.3f}, {:.1f}s; with g=phi^-1(x^2-y^2): d_hat={:.3f}, decay={:.3f}",
      main["u_at_origin"].get<double>(), d_hat, decay, elapsed, d_sup, decay_sup);
  r.details = {{"measured", main}, {"runtime_s", elapsed}, {"supplementary", supplementary}};
  return r;
}

// Positive and negative phase areas in the unit disk, on every converged run of AC-2, AC-4, AC-5.
CriterionResult AcceptanceSuite::ac6() {
  CriterionResult r;
  r.title = "sign-set measures";
  struct Family {
    std::string name;
    std::vector<std::pair<std::string, BrokenProblem>> runs;  // coarse to fine
  };
  std::vector<Family> families;
  for (int regime = 0; regime < 2; ++regime) {
    Family f{fmt::format("ac2_s{}", regime), {}};
    for (int n : {65, 129}) {
      f.runs.emplace_back(fmt::format("ac2_s{}_n{}", regime, n),
                          regime == 0 ? heaviside_problem("2", "1", "x", n)
                                      : power_problem(1.0, "1", "1", "x", n));
    }
    families.push_back(std::move(f));
  }
  {
    Family f{"ac4", {}};
    for (int n : {65, 129, 257}) {
      f.runs.emplace_back(fmt::format("ac4_n{}", n), heaviside_problem(kHolderAPlus, "1", "x", n));
    }
    families.push_back(std::move(f));
  }
  {
    // the AC-5 grid plus one coarser grid so stability can be judged
    Family f{"ac5", {}};
    f.runs.emplace_back("ac5_n129", heaviside_problem("2", "1", "x^2-y^2", 129));
    f.runs.emplace_back("ac5_n257", heaviside_problem("2", "1", "x^2-y^2", 257));
    families.push_back(std::move(f));
  }

  const double floor = 0.05 * kPi;
  r.passed = true;
  json out = json::array();
  double worst_min = std::numeric_limits<double>::infinity();
  double worst_change = 0.0;
  for (const auto& f : families) {
    json grids = json::array();
    std::vector<double> mins;
    bool ok = true;
    for (const auto& [name, p] : f.runs) {
      const SolveRun& run = solve(name, p);
      if (!run.report.converged) {
        grids.push_back({{"run", name}, {"converged", false}});
        continue;
      }
      const SignMeasures m = sign_measures(run.report.u, {0.0, 0.0}, 1.0);
      const double lo = std::min(m.positive, m.negative);
      mins.push_back(lo);
      ok = ok && lo >= floor;
      worst_min = std::min(worst_min, lo);
      grids.push_back({{"run", name}, {"positive", m.positive}, {"negative", m.negative}, {"min", lo}});
    }
    double change = std::numeric_limits<double>::quiet_NaN();
    if (mins.size() >= 2) {
      change = rel_change(mins[mins.size() - 2], mins.back());
      worst_change = std::max(worst_change, change);
      ok = ok && change <= 0.10;
    } else {
      ok = false;
    }
    r.passed = r.passed && ok;
    out.push_back({{"family", f.name}, {"grids", grids}, {"last_change", change}, {"pass", ok}});
  }
  r.summary = fmt::format("smallest min(pos,neg)={:.4f} (floor {:.4f}), largest change {:.2f}%",
                          worst_min, floor, 100 * worst_change);
  r.details = {{"floor", floor}, {"families", out}};
  return r;
}

// Boundedness of the frequency for smooth variable coefficients.
CriterionResult AcceptanceSuite::ac7() {
  CriterionResult r;
  r.title = "frequency boundedness";
  const auto t0 = Clock::now();
  const BrokenProblem p = heaviside_problem(kSmoothAPlus, kSmoothAMinus, "x", 257);
  const SolveRun& run = solve("ac7_n257", p);
  const TransformFields tf = w_transform(run.report.u, p.model);
  const Point z = axis_crossing(run.report.u);
  const FrequencyProfile prof =
      frequency_profile(FrequencyIntegrands(tf), z, linspace(0.08, 0.4, 17));
  const double n_top = prof.entries.back().N;
  const double bound = 1.5 * n_top + 1.0;
  const double n_max = prof.max_N();
  const double elapsed = seconds_since(t0);
  r.passed = run.report.converged && !prof.any_degenerate() && n_max <= bound && elapsed < 60.0;

  json entries = json::array();
  for (const auto& e : prof.entries) {
    entries.push_back({{"r", e.r}, {"H", e.H}, {"I", e.I}, {"N", e.N}, {"doubling", e.doubling},
                       {"flag", e.flag}});
  }
  r.summary = fmt::format("z=({:.4f},{:.4f}), max N={:.4f} <= 1.5*N(0.4)+1={:.4f}, degenerate={}, {:.1f}s",
                          z.x, z.y, n_max, bound, prof.any_degenerate(), elapsed);
  r.details = {{"z", {z.x, z.y}}, {"max_N", n_max}, {"N_at_rmax", n_top}, {"bound", bound},
               {"profile", entries}, {"solve", history(run)}, {"runtime_s", elapsed}};
  return r;
}

// phi_s round trip and the two-sided bound of the frozen transform.
CriterionResult AcceptanceSuite::ac8() {
  CriterionResult r;
  r.title = "transform identities";
  std::mt19937_64 rng(seed_);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  std::uniform_real_distribution<double> coeff(0.5, 2.0);
  const double exponents[3] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double v = value(rng);
    const double a = coeff(rng);
    const double b = coeff(rng);
    const double s = exponents[rng() % 3];
    worst = std::max(worst, std::abs(phi_s(phi_s_inverse(v, a, b, s), a, b, s) - v));
  }
  const bool round_trip = worst <= 1e-12;

  json runs = json::array();
  bool bounds = true;
  for (int regime = 0; regime < 2; ++regime) {
    for (int n : {65, 129}) {
      const BrokenProblem p = regime == 0 ? heaviside_problem("2", "1", "x", n)
                                          : power_problem(1.0, "1", "1", "x", n);
      const SolveRun& run = solve(fmt::format("ac2_s{}_n{}", regime, n), p);
      const ScalarField& u = run.report.u;
      const double lambda = p.model.lambda;
      std::size_t violations = 0;
      double low = std::numeric_limits<double>::infinity(), high = 0.0;
      for (const Point z : {Point{0.0, 0.0}, Point{-0.5, 0.5}, Point{0.5, -0.5}}) {
        const ScalarField v = phi_frozen(u, z, p.model);
        for (std::size_t k = 0; k < u.size(); ++k) {
          const double au = std::abs(u[k]);
          const double av = std::abs(v[k]);
          const double slack = 1e-12 * std::max(1.0, au);
          if (av < lambda * au - slack || av > au / lambda + slack) ++violations;
          if (au > 1e-12) {
            low = std::min(low, av / au);
            high = std::max(high, av / au);
          }
        }
      }
      bounds = bounds && violations == 0;
      runs.push_back({{"run", fmt::format("ac2_s{}_n{}", regime, n)}, {"violations", violations},
                      {"min_ratio", low}, {"max_ratio", high}});
    }
  }
  r.passed = round_trip && bounds;
  r.summary = fmt::format("round trip max error {:.3g}, two-sided bound {}", worst,
                          bounds ? "holds on every AC-2 run" : "violated");
  r.details = {{"draws", 1000}, {"seed", seed_}, {"max_round_trip_error", worst}, {"runs", runs}};
  return r;
}

// Nodal length in B_{1/2} against the frequency over a sweep of configurations.
CriterionResult AcceptanceSuite::ac9() {
  CriterionResult r;
  r.title = "nodal length bound shape";
  struct Config {
    std::string name;
    std::function<BrokenProblem(int)> make;
  };
  const std::vector<Config> sweep{
      {"ac7", [](int n) { return heaviside_problem(kSmoothAPlus, kSmoothAMinus, "x", n); }},
      {"ac2_s1", [](int n) { return power_problem(1.0, "1", "1", "x", n); }},
      {"ac2_s0", [](int n) { return heaviside_problem("2", "1", "x", n); }},
      {"ac4", [](int n) { return heaviside_problem(kHolderAPlus, "1", "x", n); }},
      {"saddle", [](int n) { return heaviside_problem("2", "1", kSaddleInverse, n); }},
  };

  auto length_of = [&](const std::string& name, int n, const Config& c) {
    const SolveRun& run = solve(fmt::format("{}_n{}", name, n), c.make(n));
    return std::pair{nodal_length(extract_nodal(run.report.u), {0.0, 0.0}, 0.5), &run};
  };

  // stability under the last refinement of the two named runs
  json stability = json::array();
  bool stable = true;
  const std::pair<int, int> pairs[2] = {{129, 257}, {65, 129}};
  for (int k = 0; k < 2; ++k) {
    const auto [coarse, run_c] = length_of(sweep[k].name, pairs[k].first, sweep[k]);
    const auto [fine, run_f] = length_of(sweep[k].name, pairs[k].second, sweep[k]);
    const double change = rel_change(coarse, fine);
    const bool ok = run_c->report.converged && run_f->report.converged && std::isfinite(fine) &&
                    change <= 0.05;
    stable = stable && ok;
    stability.push_back({{"config", sweep[k].name}, {"n", {pairs[k].first, pairs[k].second}},
                         {"length", {coarse, fine}}, {"change", change}, {"pass", ok}});
  }

  // length / N across the sweep, all on n = 129
  json rows = json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool all_converged = true;
  for (const auto& c : sweep) {
    const auto [length, run] = length_of(c.name, 129, c);
    all_converged = all_converged && run->report.converged;
    const TransformFields tf = w_transform(run->report.u, run->problem.model);
    const FrequencyValue fv = FrequencyIntegrands(tf).at({0.0, 0.0}, 0.9);
    const double ratio = length / fv.N;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    rows.push_back({{"config", c.name}, {"length", length}, {"N", fv.N}, {"ratio", ratio}});
  }
  const double spread = hi / lo;
  r.passed = stable && all_converged && spread <= 3.0;
  r.summary = fmt::format("length change {:.2f}%/{:.2f}%, length/N in [{:.3f}, {:.3f}] (spread {:.2f})",
                          100 * stability[0]["change"].get<double>(),
                          100 * stability[1]["change"].get<double>(), lo, hi, spread);
  r.details = {{"stability", stability}, {"sweep", rows}, {"ratio_spread", spread},
               {"frequency_radius", 0.9}};
  return r;
}

json suite_report(const std::vector<CriterionResult>& results) {
  json list = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    list.push_back({{"id", r.id},
                    {"title", r.title},
                    {"result", verdict(r.passed)},
                    {"seconds", r.seconds},
                    {"summary", r.summary},
                    {"details", r.details}});
  }
  return {{"criteria", list}, {"result", verdict(all)}};
}

}  // namespace brokenpde
