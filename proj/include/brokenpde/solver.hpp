#pragma once

#include <optional>
#include <vector>

#include "brokenpde/coefficients.hpp"
#include "brokenpde/expr.hpp"
#include "brokenpde/grid.hpp"

namespace brokenpde {

/// div(A(x, u) grad u) = div f with Dirichlet data `boundary`.
struct BrokenProblem {
  GridSpec grid;
  CoefficientModel model;
  Expr boundary;
  double tol_picard = 1e-10;
  int max_picard_iterations = 200;
  double theta = 1.0;  ///< initial damping in (0, 1]
  double tol_cg = 1e-12;
  int max_cg_iterations = 0;  ///< 0 selects 20 * n^2

  void validate() const;
  int cg_iteration_limit() const;
};

/// Five-point (three-point in 1D) divergence-form operator frozen at some u.
///
/// The stored operator is the positive one, M u = -div_h(k grad_h u), acting on
/// interior nodes; boundary nodes carry Dirichlet values.
struct LinearSystem {
  GridSpec grid;
  std::vector<double> kx;        ///< conductivity of edge (i,j)-(i+1,j), index j*(n0-1)+i
  std::vector<double> ky;        ///< conductivity of edge (i,j)-(i,j+1), index j*n0+i
  std::vector<double> dirichlet; ///< full-grid field; only boundary entries are used
  std::vector<double> forcing;   ///< centered div_h f at every node (zero on the boundary)
  std::vector<double> rhs;       ///< -forcing plus boundary lifts, interior nodes only
  double tol_cg = 1e-12;
  int max_cg_iterations = 1000;

  double edge_x(int i, int j) const { return kx[static_cast<std::size_t>(j) * (grid.n[0] - 1) + i]; }
  double edge_y(int i, int j) const { return ky[static_cast<std::size_t>(j) * grid.n[0] + i]; }

  /// Coefficients of div_h(k grad_h .) at interior node (i, j): negative center.
  struct Stencil {
    double center = 0, west = 0, east = 0, south = 0, north = 0;
  };
  Stencil stencil(int i, int j = 0) const;

  /// out = M u on interior nodes, treating boundary entries of u as zero.
  void apply(const std::vector<double>& u, std::vector<double>& out) const;
  double diagonal(int i, int j) const;

  /// max over interior nodes of h^2 |div_h(k grad_h u) - div_h f| for a full field u.
  double scaled_residual(const ScalarField& u) const;
};

/// Builds the frozen system with edge conductivities equal to the harmonic
/// mean of evaluate_A at the two end nodes.
LinearSystem assemble(const BrokenProblem& p, const ScalarField& u_frozen);

/// Same discretization with given nodal conductivities.
LinearSystem assemble_divergence(const GridSpec& grid, const std::vector<double>& node_conductivity,
                                 const std::vector<double>& dirichlet,
                                 const std::vector<double>& forcing);

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients to relative residual tol_cg.
/// Throws NoConvergence with the iteration count and residual.
ScalarField solve_linear(const LinearSystem& sys, const ScalarField* initial_guess = nullptr,
                         LinearSolveStats* stats = nullptr);

struct SolveReport {
  ScalarField u;
  int picard_iterations = 0;
  std::vector<double> update_history;
  double final_nonlinear_residual = 0.0;
  bool converged = false;
  double final_theta = 1.0;
  long cg_iterations = 0;
};

/// Frozen-coefficient fixed-point iteration
///   u_{k+1} = (1 - theta) u_k + theta solve_linear(assemble(p, u_k)),
/// started from the unit-conductivity solve. Stops once the sup update is at
/// most tol_picard * max(1, |u_k|_inf); theta halves (down to 1/16) whenever the
/// update fails to decrease three times in a row. Running out of iterations
/// yields converged == false rather than an exception.
SolveReport picard_solve(const BrokenProblem& p);

}  // namespace brokenpde
