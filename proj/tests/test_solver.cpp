#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/solver.hpp"

using namespace brokenpde;

namespace {

BrokenProblem laplace(const char* g, int n = 33) {
  BrokenProblem p;
  p.grid = GridSpec::square(-1, 1, n);
  p.model = CoefficientModel::heaviside(parse("1"), parse("1"));
  p.boundary = parse(g);
  return p;
}

BrokenProblem broken(const char* ap, const char* am, const char* g, int n = 33) {
  BrokenProblem p = laplace(g, n);
  p.model = CoefficientModel::heaviside(parse(ap), parse(am));
  return p;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("assemble: constant coefficients give the 5-point Laplacian") {
  const BrokenProblem p = laplace("0", 9);
  const LinearSystem sys = assemble(p, ScalarField(p.grid));
  const double h2 = p.grid.h(0) * p.grid.h(0);
  const auto st = sys.stencil(3, 4);
  CHECK(st.center * h2 == doctest::Approx(-4.0));
  CHECK(st.west * h2 == doctest::Approx(1.0));
  CHECK(st.east * h2 == doctest::Approx(1.0));
  CHECK(st.south * h2 == doctest::Approx(1.0));
  CHECK(st.north * h2 == doctest::Approx(1.0));
}

TEST_CASE("assemble: harmonic-mean edge conductivities in 1D") {
  BrokenProblem p;
  p.grid = GridSpec::interval(-1, 1, 3);
  p.model = CoefficientModel::heaviside(parse("2"), parse("1"));
  p.boundary = parse("x");
  const ScalarField frozen(p.grid, {-1.0, -0.5, 1.0});
  const LinearSystem sys = assemble(p, frozen);
  REQUIRE(sys.kx.size() == 2);
  CHECK(sys.kx[0] == doctest::Approx(1.0));
  CHECK(sys.kx[1] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("assemble: right side is the centred divergence of f") {
  BrokenProblem p = laplace("0", 9);
  p.model.f_x = parse("1");
  CHECK(assemble(p, ScalarField(p.grid)).forcing[p.grid.index(4, 4)] == doctest::Approx(0.0));
  p.model.f_x = parse("x^2");
  p.model.f_y = parse("y");
  const LinearSystem sys = assemble(p, ScalarField(p.grid));
  for (int j = 1; j < 8; ++j) {
    for (int i = 1; i < 8; ++i) {
      CHECK(sys.forcing[p.grid.index(i, j)] == doctest::Approx(2 * p.grid.node(i, j).x + 1.0));
    }
  }
}

TEST_CASE("solve_linear") {
  {
    const BrokenProblem p = laplace("x");
    const ScalarField u = solve_linear(assemble(p, ScalarField(p.grid)));
    CHECK(sup_diff(u, sample(parse("x"), p.grid)) <= 1e-10);
  }
  {
    BrokenProblem p = laplace("x^2-y^2");
    LinearSystem sys = assemble(p, ScalarField(p.grid));
    sys.max_cg_iterations = 5000;
    const ScalarField u = solve_linear(sys);
    CHECK(sup_diff(u, sample(parse("x^2-y^2"), p.grid)) <= 1e-9);
  }
  {
    const BrokenProblem p = laplace("0");
    CHECK(solve_linear(assemble(p, ScalarField(p.grid))).max_abs() == 0.0);
  }
  {
    const BrokenProblem p = laplace("x^2-y^2");
    LinearSystem sys = assemble(p, ScalarField(p.grid));
    sys.max_cg_iterations = 1;
    try {
      solve_linear(sys);
      FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
      CHECK(e.iterations() == 1);
      CHECK(e.residual() > 0.0);
    }
  }
}

TEST_CASE("picard_solve: unbroken problem") {
  const SolveReport r = picard_solve(laplace("x"));
  CHECK(r.converged);
  CHECK(r.picard_iterations <= 2);
  CHECK(sup_diff(r.u, sample(parse("x"), r.u.grid())) <= 1e-10);
}

TEST_CASE("picard_solve: fixed point, maximum principle, sign equivariance") {
  const BrokenProblem p = broken("2", "1", "x+0.3*y", 33);
  const SolveReport r = picard_solve(p);
  REQUIRE(r.converged);
  CHECK(r.final_nonlinear_residual <= 10 * p.tol_picard * std::max(1.0, r.u.max_abs()));
  CHECK(assemble(p, r.u).scaled_residual(r.u) <= 10 * p.tol_picard * r.u.max_abs());

  double lo = 1e300, hi = -1e300;
  const GridSpec& g = p.grid;
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      if (!g.is_boundary(i, j)) continue;
      lo = std::min(lo, r.u(i, j));
      hi = std::max(hi, r.u(i, j));
    }
  }
  for (double v : r.u.values()) {
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }

  const SolveReport mirror = picard_solve(broken("1", "2", "-(x+0.3*y)", 33));
  REQUIRE(mirror.converged);
  // exact zeros would break the symmetry of H(0) = 0; none occur here
  double worst = 0;
  for (std::size_t k = 0; k < r.u.size(); ++k) worst = std::max(worst, std::abs(r.u[k] + mirror.u[k]));
  CHECK(worst <= 1e-8);
}

TEST_CASE("picard_solve: forced non-convergence is reported, not thrown") {
  BrokenProblem p = broken("2", "1", "x", 33);
  p.max_picard_iterations = 1;
  const SolveReport r = picard_solve(p);
  CHECK_FALSE(r.converged);
  CHECK(r.picard_iterations == 1);
  CHECK(r.update_history.size() == 1);
}

TEST_CASE("picard_solve: s > 0 and forcing") {
  BrokenProblem p = laplace("x", 33);
  p.model = CoefficientModel::power(1.0, parse("1"), parse("1"));
  p.model.f_x = parse("0.5*y");
  const SolveReport r = picard_solve(p);
  CHECK(r.converged);
  CHECK(r.final_nonlinear_residual <= 10 * p.tol_picard * std::max(1.0, r.u.max_abs()));
}

TEST_CASE("problem validation") {
  BrokenProblem p = laplace("x");
  p.theta = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.theta = 1.0;
  p.tol_picard = -1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  CHECK(laplace("x", 17).cg_iteration_limit() == 20 * 17 * 17);
}
