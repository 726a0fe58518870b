#include "brokenpde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/log.hpp"

namespace brokenpde {

namespace {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

/// Calls fn(i, j, flat) for every interior node.
template <typename Fn>
void for_interior(const GridSpec& g, Fn&& fn) {
  const int jlo = g.dim == 2 ? 1 : 0;
  const int jhi = g.dim == 2 ? g.n[1] - 1 : 1;
  for (int j = jlo; j < jhi; ++j) {
    for (int i = 1; i < g.n[0] - 1; ++i) fn(i, j, g.index(i, j));
  }
}

std::vector<double> centered_divergence(const GridSpec& g, const CoefficientModel& m) {
  std::vector<double> div(g.node_count(), 0.0);
  if (m.zero_forcing()) return div;
  const ScalarField fx = sample(m.f_x, g);
  const ScalarField fy = sample(m.f_y, g);
  for_interior(g, [&](int i, int j, std::size_t k) {
    double d = (fx(i + 1, j) - fx(i - 1, j)) / (2.0 * g.h(0));
    if (g.dim == 2) d += (fy(i, j + 1) - fy(i, j - 1)) / (2.0 * g.h(1));
    div[k] = d;
  });
  return div;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void BrokenProblem::validate() const {
  grid.validate();
  model.validate();
  if (!(tol_picard > 0.0)) throw InvalidArgument("tol_picard must be positive");
  if (!(tol_cg > 0.0)) throw InvalidArgument("tol_cg must be positive");
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in (0, 1]");
  if (max_picard_iterations < 1) throw InvalidArgument("max_picard_iterations must be >= 1");
  if (max_cg_iterations < 0) throw InvalidArgument("max_cg_iterations must be >= 0");
}

int BrokenProblem::cg_iteration_limit() const {
  if (max_cg_iterations > 0) return max_cg_iterations;
  const int n = std::max(grid.n[0], grid.n[1]);
  return 20 * n * n;
}

LinearSystem::Stencil LinearSystem::stencil(int i, int j) const {
  Stencil s;
  const double hx2 = grid.h(0) * grid.h(0);
  s.west = edge_x(i - 1, j) / hx2;
  s.east = edge_x(i, j) / hx2;
  if (grid.dim == 2) {
    const double hy2 = grid.h(1) * grid.h(1);
    s.south = edge_y(i, j - 1) / hy2;
    s.north = edge_y(i, j) / hy2;
  }
  s.center = -(s.west + s.east + s.south + s.north);
  return s;
}

double LinearSystem::diagonal(int i, int j) const { return -stencil(i, j).center; }

void LinearSystem::apply(const std::vector<double>& u, std::vector<double>& out) const {
  const GridSpec& g = grid;
  out.assign(g.node_count(), 0.0);
  const double hx2 = g.h(0) * g.h(0);
  const double hy2 = g.dim == 2 ? g.h(1) * g.h(1) : 1.0;
  auto val = [&](int i, int j) { return g.is_boundary(i, j) ? 0.0 : u[g.index(i, j)]; };
  for_interior(g, [&](int i, int j, std::size_t k) {
    const double c = u[k];
    double s = edge_x(i - 1, j) * (c - val(i - 1, j)) + edge_x(i, j) * (c - val(i + 1, j));
    s /= hx2;
    if (g.dim == 2) {
      s += (edge_y(i, j - 1) * (c - val(i, j - 1)) + edge_y(i, j) * (c - val(i, j + 1))) / hy2;
    }
    out[k] = s;
  });
}

double LinearSystem::scaled_residual(const ScalarField& u) const {
  const GridSpec& g = grid;
  const double hx2 = g.h(0) * g.h(0);
  const double hy2 = g.dim == 2 ? g.h(1) * g.h(1) : 1.0;
  const double scale = g.min_spacing() * g.min_spacing();
  double worst = 0.0;
  for_interior(g, [&](int i, int j, std::size_t k) {
    const double c = u[k];
    double l = (edge_x(i - 1, j) * (u(i - 1, j) - c) + edge_x(i, j) * (u(i + 1, j) - c)) / hx2;
    if (g.dim == 2) {
      l += (edge_y(i, j - 1) * (u(i, j - 1) - c) + edge_y(i, j) * (u(i, j + 1) - c)) / hy2;
    }
    worst = std::max(worst, std::abs(l - forcing[k]) * scale);
  });
  return worst;
}

LinearSystem assemble_divergence(const GridSpec& g, const std::vector<double>& node_k,
                                 const std::vector<double>& dirichlet,
                                 const std::vector<double>& forcing) {
  g.validate();
  if (node_k.size() != g.node_count() || dirichlet.size() != g.node_count() ||
      forcing.size() != g.node_count()) {
    throw InvalidArgument("assemble: per-node inputs must match the grid");
  }
  LinearSystem sys;
  sys.grid = g;
  sys.dirichlet = dirichlet;
  sys.forcing = forcing;
  sys.kx.resize(static_cast<std::size_t>(g.n[0] - 1) * g.n[1]);
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      sys.kx[static_cast<std::size_t>(j) * (g.n[0] - 1) + i] =
          harmonic_mean(node_k[g.index(i, j)], node_k[g.index(i + 1, j)]);
    }
  }
  if (g.dim == 2) {
    sys.ky.resize(static_cast<std::size_t>(g.n[0]) * (g.n[1] - 1));
    for (int j = 0; j + 1 < g.n[1]; ++j) {
      for (int i = 0; i < g.n[0]; ++i) {
        sys.ky[static_cast<std::size_t>(j) * g.n[0] + i] =
            harmonic_mean(node_k[g.index(i, j)], node_k[g.index(i, j + 1)]);
      }
    }
  }

  sys.rhs.assign(g.node_count(), 0.0);
  const double hx2 = g.h(0) * g.h(0);
  const double hy2 = g.dim == 2 ? g.h(1) * g.h(1) : 1.0;
  for_interior(g, [&](int i, int j, std::size_t k) {
    double r = -forcing[k];
    auto lift = [&](int ni, int nj, double cond, double h2) {
      if (g.is_boundary(ni, nj)) r += cond * dirichlet[g.index(ni, nj)] / h2;
    };
    lift(i - 1, j, sys.edge_x(i - 1, j), hx2);
    lift(i + 1, j, sys.edge_x(i, j), hx2);
    if (g.dim == 2) {
      lift(i, j - 1, sys.edge_y(i, j - 1), hy2);
      lift(i, j + 1, sys.edge_y(i, j), hy2);
    }
    sys.rhs[k] = r;
  });
  return sys;
}

LinearSystem assemble(const BrokenProblem& p, const ScalarField& u_frozen) {
  if (!(u_frozen.grid() == p.grid)) throw InvalidArgument("assemble: frozen field grid mismatch");
  const SampledCoefficients coeff(p.model, p.grid);
  std::vector<double> node_k(p.grid.node_count());
  for (std::size_t k = 0; k < node_k.size(); ++k) node_k[k] = coeff.A(k, u_frozen[k]);
  const ScalarField g = sample(p.boundary, p.grid);
  LinearSystem sys =
      assemble_divergence(p.grid, node_k, g.values(), centered_divergence(p.grid, p.model));
  sys.tol_cg = p.tol_cg;
  sys.max_cg_iterations = p.cg_iteration_limit();
  return sys;
}

ScalarField solve_linear(const LinearSystem& sys, const ScalarField* initial_guess,
                         LinearSolveStats* stats) {
  const GridSpec& g = sys.grid;
  const std::size_t n = g.node_count();
  std::vector<double> x(n, 0.0);
  std::vector<double> inv_diag(n, 0.0);
  for_interior(g, [&](int i, int j, std::size_t k) {
    inv_diag[k] = 1.0 / sys.diagonal(i, j);
    if (initial_guess) x[k] = (*initial_guess)[k];
  });

  auto finish = [&](int iterations, double rel) {
    if (stats) *stats = {iterations, rel};
    for (int j = 0; j < g.n[1]; ++j) {
      for (int i = 0; i < g.n[0]; ++i) {
        if (g.is_boundary(i, j)) x[g.index(i, j)] = sys.dirichlet[g.index(i, j)];
      }
    }
    return ScalarField(g, std::move(x));
  };

  const double bnorm = std::sqrt(dot(sys.rhs, sys.rhs));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return finish(0, 0.0);
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  sys.apply(x, q);
  for_interior(g, [&](int, int, std::size_t k) { r[k] = sys.rhs[k] - q[k]; });
  double rnorm = std::sqrt(dot(r, r));
  if (rnorm <= sys.tol_cg * bnorm) return finish(0, rnorm / bnorm);

  for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= sys.max_cg_iterations; ++it) {
    sys.apply(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= sys.tol_cg * bnorm) return finish(it, rnorm / bnorm);
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw NoConvergence(fmt::format("conjugate gradients stalled after {} iterations (relative "
                                  "residual {:.3e})",
                                  sys.max_cg_iterations, rnorm / bnorm),
                      sys.max_cg_iterations, rnorm / bnorm);
}

SolveReport picard_solve(const BrokenProblem& p) {
  p.validate();
  const GridSpec& g = p.grid;
  const ScalarField boundary = sample(p.boundary, g);
  const std::vector<double> forcing = centered_divergence(g, p.model);
  const SampledCoefficients coeff(p.model, g);

  auto frozen_system = [&](const ScalarField& u) {
    std::vector<double> node_k(g.node_count());
    for (std::size_t k = 0; k < node_k.size(); ++k) node_k[k] = coeff.A(k, u[k]);
    LinearSystem sys = assemble_divergence(g, node_k, boundary.values(), forcing);
    sys.tol_cg = p.tol_cg;
    sys.max_cg_iterations = p.cg_iteration_limit();
    return sys;
  };

  SolveReport report;
  LinearSolveStats stats;
  {
    LinearSystem unit =
        assemble_divergence(g, std::vector<double>(g.node_count(), 1.0), boundary.values(), forcing);
    unit.tol_cg = p.tol_cg;
    unit.max_cg_iterations = p.cg_iteration_limit();
    report.u = solve_linear(unit, nullptr, &stats);
    report.cg_iterations += stats.iterations;
  }

  double theta = p.theta;
  int stalls = 0;
  bool stopped = false;
  ScalarField& u = report.u;
  for (int it = 1; it <= p.max_picard_iterations; ++it) {
    const ScalarField candidate = solve_linear(frozen_system(u), &u, &stats);
    report.cg_iterations += stats.iterations;
    ScalarField next(g);
    double update = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      next[k] = (1.0 - theta) * u[k] + theta * candidate[k];
      update = std::max(update, std::abs(next[k] - u[k]));
    }
    const double scale = std::max(1.0, u.max_abs());
    report.picard_iterations = it;
    if (!report.update_history.empty() && update >= report.update_history.back()) {
      if (++stalls >= 3) {
        theta = std::max(theta / 2.0, 1.0 / 16.0);
        stalls = 0;
        log().debug("picard: damping reduced to {}", theta);
      }
    } else {
      stalls = 0;
    }
    report.update_history.push_back(update);
    log().debug("picard {}: update {:.3e} (theta {})", it, update, theta);
    u = std::move(next);
    if (update <= p.tol_picard * scale) {
      stopped = true;
      break;
    }
  }
  report.final_theta = theta;
  report.final_nonlinear_residual = frozen_system(u).scaled_residual(u);
  report.converged =
      stopped && report.final_nonlinear_residual <= 10.0 * p.tol_picard * u.max_abs();
  if (!report.converged) {
    log().info("picard: not converged after {} iterations (residual {:.3e})",
               report.picard_iterations, report.final_nonlinear_residual);
  }
  return report;
}

}  // namespace brokenpde
