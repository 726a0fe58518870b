#include "brokenpde/oracles.hpp"

#include <fmt/format.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/solver.hpp"
#include "brokenpde/transforms.hpp"

namespace brokenpde {

OracleSolution transmission_1d(double a_plus, double a_minus, double g_left, double g_right,
                               double lo, double hi) {
  if (!(g_left < 0.0 && g_right > 0.0)) {
    throw NoSignChange(fmt::format("boundary data ({}, {}) does not straddle zero", g_left, g_right));
  }
  if (!(a_plus > 0.0 && a_minus > 0.0)) throw InvalidArgument("phase constants must be positive");
  // c (x0 - lo) / a_minus = -g_left and c (hi - x0) / a_plus = g_right
  const double flux = (g_right * a_plus - g_left * a_minus) / (hi - lo);
  const double x0 = lo - g_left * a_minus / flux;

  OracleSolution s;
  s.kind = "transmission_1d";
  s.interface = x0;
  s.flux = flux;
  s.slope_minus = flux / a_minus;
  s.slope_plus = flux / a_plus;
  s.field = [x0, sm = s.slope_minus, sp = s.slope_plus](Point p) {
    return p.x <= x0 ? sm * (p.x - x0) : sp * (p.x - x0);
  };
  return s;
}

OracleSolution harmonic_inversion_exact(const CoefficientModel& m, const Expr& g,
                                        const GridSpec& grid, double tol_cg) {
  for (const auto& [name, e] : m.phase_coefficients()) {
    if (!e.is_constant()) throw InvalidArgument("harmonic inversion needs constant " + name);
  }
  if (!m.zero_forcing()) throw InvalidArgument("harmonic inversion needs f = 0");
  const double first = m.is_heaviside() ? m.a_plus.evaluate({}) : m.a.evaluate({});
  const double second = m.is_heaviside() ? m.a_minus.evaluate({}) : m.b.evaluate({});
  auto phi = [&](double u) {
    return m.is_heaviside() ? phi_heaviside(u, first, second) : phi_s(u, first, second, m.s);
  };
  auto phi_inv = [&](double v) {
    return m.is_heaviside() ? phi_heaviside_inverse(v, first, second)
                            : phi_s_inverse(v, first, second, m.s);
  };

  const ScalarField boundary = sample(g, grid);
  std::vector<double> data(grid.node_count());
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = phi(boundary[k]);
  LinearSystem sys = assemble_divergence(grid, std::vector<double>(grid.node_count(), 1.0), data,
                                         std::vector<double>(grid.node_count(), 0.0));
  sys.tol_cg = tol_cg;
  const int n = std::max(grid.n[0], grid.n[1]);
  sys.max_cg_iterations = 20 * n * n;
  ScalarField h = solve_linear(sys);

  ScalarField u(grid);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = phi_inv(h[k]);

  OracleSolution s;
  s.kind = "harmonic_inversion_exact";
  s.nodal = u;
  s.harmonic = std::move(h);
  s.field = [nodal = std::move(u)](Point p) { return interpolate(nodal, p); };
  return s;
}

}  // namespace brokenpde
