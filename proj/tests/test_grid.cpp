#include <cmath>
#include <numbers>

#include <doctest.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/grid.hpp"

using namespace brokenpde;

namespace {
constexpr double kPi = std::numbers::pi;
ScalarField field(const char* text, const GridSpec& g) { return sample(parse(text), g); }
}  // namespace

TEST_CASE("GridSpec construction and indexing") {
  const GridSpec g = GridSpec::square(-1, 1, 5);
  CHECK(g.h(0) == 0.5);
  CHECK(g.node_count() == 25);
  CHECK(g.node(2, 2) == Point{0, 0});
  CHECK(g.index(1, 2) == 11);
  CHECK(g.node(std::size_t{11}) == g.node(1, 2));
  CHECK(g.is_boundary(0, 3));
  CHECK_FALSE(g.is_boundary(2, 2));
  CHECK(g.contains({1.0, -1.0}));
  CHECK_FALSE(g.contains({1.1, 0.0}));

  GridSpec bad = g;
  bad.n = {2, 5};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = g;
  bad.hi[0] = bad.lo[0];
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.dim = 3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("sample") {
  const GridSpec line = GridSpec::interval(-1, 1, 3);
  const ScalarField x = field("x", line);
  CHECK(x.values() == std::vector<double>{-1, 0, 1});
  const ScalarField zero = field("0", GridSpec::square(-1, 1, 9));
  CHECK(zero.max_abs() == 0.0);
  try {
    field("1/x", line);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("(0") != std::string::npos);
  }
}

TEST_CASE("interpolate") {
  const GridSpec g = GridSpec::square(-1, 1, 9);
  const ScalarField f = field("x+2*y", g);
  CHECK(interpolate(f, {0.3, 0.4}) == doctest::Approx(1.1).epsilon(1e-14));
  const ScalarField q = field("x^2*y+sin(x)", g);
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) CHECK(interpolate(q, g.node(i, j)) == q(i, j));
  }
  CHECK_THROWS_AS(interpolate(f, {1.5, 0.0}), OutOfBounds);
  const ScalarField l = field("3*x-1", GridSpec::interval(0, 2, 9));
  CHECK(interpolate(l, {0.77, 0}) == doctest::Approx(3 * 0.77 - 1));
}

TEST_CASE("gradient") {
  const GridSpec g = GridSpec::square(-1, 1, 9);
  const VectorField gx = gradient(field("x", g));
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    CHECK(gx.x[k] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(gx.y[k]) < 1e-13);
  }
  const VectorField q = gradient(field("x^2", g));
  CHECK(q.x[g.index(6, 3)] == doctest::Approx(1.0).epsilon(1e-14));  // node x = 0.5
  CHECK(q.x[g.index(8, 3)] == doctest::Approx(2.0).epsilon(1e-13));  // one-sided, still exact
  const VectorField xy = gradient(field("x*y", g));
  const Point p = g.node(2, 5);
  CHECK(xy.x[g.index(2, 5)] == doctest::Approx(p.y));
  CHECK(xy.y[g.index(2, 5)] == doctest::Approx(p.x));
  const VectorField affine = gradient(field("0.3*x-1.7*y+2", g));
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    CHECK(affine.x[k] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(affine.y[k] == doctest::Approx(-1.7).epsilon(1e-12));
  }
}

TEST_CASE("circle integral") {
  const GridSpec g = GridSpec::square(-1, 1, 129);
  CHECK(std::abs(circle_integral(field("x^2", g), {0, 0}, 0.5) - kPi * 0.125) < 1e-3);
  CHECK(std::abs(circle_integral(field("1", g), {0, 0}, 0.5) - kPi) < 1e-6);
  CHECK(std::abs(circle_integral(field("x", g), {0, 0}, 0.37)) < 1e-10);
  CHECK_THROWS_AS(circle_integral(field("1", g), {0.8, 0}, 0.5), OutOfBounds);
  CHECK_THROWS_AS(circle_integral(field("1", g), {0, 0}, g.h(0)), InvalidArgument);
  const ScalarField line = field("x^2", GridSpec::interval(-1, 1, 65));
  CHECK(circle_integral(line, {0.25, 0}, 0.5) == doctest::Approx(0.0625 + 0.5625));
}

TEST_CASE("disk integral") {
  const GridSpec g = GridSpec::square(-1, 1, 129);
  CHECK(std::abs(disk_integral(field("1", g), {0, 0}, 0.5) - kPi * 0.25) < 5e-3);
  CHECK(std::abs(disk_integral(field("x^2+y^2", g), {0, 0}, 0.5) - kPi * 0.0625 / 2) < 5e-3);
  CHECK(std::abs(disk_integral(field("x", g), {0, 0}, 0.5)) < 1e-6);
  CHECK_THROWS_AS(disk_integral(field("1", g), {0, 0.7}, 0.5), OutOfBounds);
  const ScalarField line = field("x", GridSpec::interval(-1, 1, 65));
  CHECK(disk_integral(line, {0.2, 0}, 0.5) == doctest::Approx(0.2));
}

TEST_CASE("quadratures converge at second order") {
  double circle_err[2], disk_err[2];
  const int ns[2] = {33, 65};
  for (int k = 0; k < 2; ++k) {
    const GridSpec g = GridSpec::square(-1, 1, ns[k]);
    const ScalarField f = field("x^2", g);
    circle_err[k] = std::abs(circle_integral(f, {0.1, 0.05}, 0.5) - kPi * 0.125 - 2 * kPi * 0.5 * 0.01);
    disk_err[k] = std::abs(disk_integral(f, {0.1, 0.05}, 0.5) - (kPi * 0.0625 / 4 + kPi * 0.25 * 0.01));
  }
  CHECK(circle_err[0] / circle_err[1] > 3.0);
  CHECK(disk_err[0] / disk_err[1] > 3.0);
}
