#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "brokenpde/coefficients.hpp"
#include "brokenpde/expr.hpp"
#include "brokenpde/grid.hpp"
#include "brokenpde/solver.hpp"

namespace brokenpde {

/// Parameters for the analysis subcommands. Unset radii fall back to
/// defaults that depend on the grid spacing.
struct AnalysisConfig {
  Point z{0.0, 0.0};
  std::optional<double> r_fit;  ///< default 8h
  std::optional<double> r_max;  ///< default 0.4
  int levels = 5;
  int degree = 2;
  double rmin = 0.1;
  double rmax = 0.4;
  int steps = 7;
  Point center{0.0, 0.0};
  double radius = 1.0;

  double r_fit_or_default(const GridSpec& g) const { return r_fit.value_or(8.0 * g.min_spacing()); }
  double r_max_or_default() const { return r_max.value_or(0.4); }
};

/// One experiment: grid, coefficient model, Dirichlet data, solver and
/// analysis settings. Loaded from JSON:
///
///   {
///     "grid": {"dim": 2, "lo": -1, "hi": 1, "n": 129},
///     "coefficients": {"s": 0, "a_plus": "2", "a_minus": "1"},
///     "boundary": "x",
///     "solver": {"tol_picard": 1e-10, "max_iterations": 200},
///     "analysis": {"z": [0, 0], "rmin": 0.1, "rmax": 0.4, "steps": 7}
///   }
///
/// lo, hi and n take a number (same on every axis) or a per-axis array.
/// Expressions may be strings or numbers. Unknown keys, and keys that do not
/// belong to the chosen regime (a/b when s == 0, a_plus/a_minus when s > 0),
/// raise ConfigError naming the key.
struct ExperimentConfig {
  GridSpec grid;
  CoefficientModel model;
  Expr boundary = Expr::constant(0.0);
  std::string boundary_text = "0";
  double tol_picard = 1e-10;
  int max_picard_iterations = 200;
  double theta = 1.0;
  double tol_cg = 1e-12;
  int max_cg_iterations = 0;
  AnalysisConfig analysis;

  static ExperimentConfig parse(const std::string& json_text);
  static ExperimentConfig load(const std::filesystem::path& path);

  BrokenProblem problem() const;
};

}  // namespace brokenpde
