#pragma once

#include <functional>
#include <string>

#include "brokenpde/coefficients.hpp"
#include "brokenpde/grid.hpp"

namespace brokenpde {

/// Reference solution with its construction metadata.
struct OracleSolution {
  std::function<double(Point)> field;
  std::string kind;

  // transmission_1d only
  double interface = 0.0;    ///< the zero x0
  double flux = 0.0;         ///< the constant A u'
  double slope_minus = 0.0;  ///< u' on {u < 0}
  double slope_plus = 0.0;   ///< u' on {u > 0}

  // harmonic_inversion_exact only
  ScalarField nodal;     ///< u_exact at the nodes
  ScalarField harmonic;  ///< the discrete harmonic extension h = phi(u_exact)
};

/// Exact piecewise-linear solution on [lo, hi] with constant phases and one
/// sign change: A u' is constant and u vanishes at the interface.
/// Throws NoSignChange unless g_left < 0 < g_right.
OracleSolution transmission_1d(double a_plus, double a_minus, double g_left, double g_right,
                               double lo = -1.0, double hi = 1.0);

/// For constant coefficients and f = 0: discrete harmonic extension h of
/// phi(g), then u_exact = phi^{-1}(h) node-wise. The result carries only the
/// Laplacian discretization error, none of the broken-coefficient error.
OracleSolution harmonic_inversion_exact(const CoefficientModel& m, const Expr& g,
                                        const GridSpec& grid, double tol_cg = 1e-12);

}  // namespace brokenpde
