#include <cmath>
#include <numbers>

#include <doctest.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/nodal.hpp"
#include "brokenpde/transforms.hpp"

using namespace brokenpde;

namespace {
constexpr double kPi = std::numbers::pi;
ScalarField field(const char* text, int n = 65) { return sample(parse(text), GridSpec::square(-1, 1, n)); }
}  // namespace

TEST_CASE("extract_nodal: line, empty set, diagonals") {
  const NodalSet line = extract_nodal(field("x+1e-3"));
  CHECK(line.total_length() == doctest::Approx(2.0).epsilon(1e-9));
  // chord of B(0, 0.5) at distance 1e-3 from the centre
  CHECK(nodal_length(line, {0, 0}, 0.5) == doctest::Approx(2 * std::sqrt(0.25 - 1e-6)).epsilon(1e-9));

  const NodalSet none = extract_nodal(field("x^2+y^2+1"));
  CHECK(none.segments.empty());
  CHECK(nodal_length(none, {0, 0}, 0.5) == 0.0);

  const NodalSet diag = extract_nodal(field("x^2-y^2", 64));
  CHECK(nodal_length(diag, {0, 0}, 0.5) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("extract_nodal: exact zeros count as the negative phase") {
  // u = x has exact zeros on the column x = 0; the polyline follows the
  // first positive column edge, still a vertical line of length 2.
  const NodalSet ns = extract_nodal(field("x"));
  CHECK(ns.total_length() == doctest::Approx(2.0).epsilon(1e-9));
  for (const auto& s : ns.segments) CHECK(std::abs(s.a.x - s.b.x) < 1e-12);
}

TEST_CASE("extract_nodal: endpoints are edge roots and no uniform-sign cell is cut") {
  const ScalarField u = field("x^2+2*y^2-0.3+0.2*x*y", 33);
  const NodalSet ns = extract_nodal(u);
  CHECK(nodal_length(ns, {0, 0}, 2.0) == doctest::Approx(ns.total_length()));
  for (const auto& s : ns.segments) {
    for (const Point p : {s.a, s.b}) CHECK(std::abs(interpolate(u, p)) <= 1e-12 * u.max_abs());
  }
  // ellipse x^2 + 2y^2 ~ 0.3 has a finite positive perimeter
  CHECK(ns.total_length() > 2.0);
  CHECK(ns.total_length() < 4.0);
}

TEST_CASE("extract_nodal: circle length converges") {
  const double exact = 2 * kPi * 0.5;
  const double coarse = extract_nodal(field("x^2+y^2-0.25", 33)).total_length();
  const double fine = extract_nodal(field("x^2+y^2-0.25", 65)).total_length();
  CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
  CHECK(fine == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("extract_nodal: saddle cells follow the centre value") {
  const GridSpec g = GridSpec::square(0, 1, 3);
  // corners of the cell [0,.5]^2 alternate in sign
  ScalarField u(g, {1, -1, -1, -1, 1, -1, -1, -1, -1});
  const NodalSet ns = extract_nodal(u);
  CHECK_FALSE(ns.segments.empty());
  for (const auto& s : ns.segments) CHECK(std::abs(interpolate(u, s.a)) < 1e-12);
}

TEST_CASE("extract_nodal in 1D returns sign changes") {
  const ScalarField u = sample(parse("x+0.3"), GridSpec::interval(-1, 1, 21));
  const NodalSet ns = extract_nodal(u);
  REQUIRE(ns.points.size() == 1);
  CHECK(ns.points[0].p.x == doctest::Approx(-0.3));
  CHECK(nodal_length(ns, {0, 0}, 0.5) == 1.0);
}

TEST_CASE("nodal_length is monotone in the radius") {
  const NodalSet ns = extract_nodal(field("sin(3*x)+y"));
  double prev = 0;
  for (double r = 0.05; r <= 1.4; r += 0.05) {
    const double l = nodal_length(ns, {0.1, 0}, r);
    CHECK(l >= prev);
    prev = l;
  }
}

TEST_CASE("sign measures") {
  const SignMeasures half = sign_measures(field("x+1e-9"), {0, 0}, 1.0);
  CHECK(half.positive == doctest::Approx(kPi / 2).epsilon(0.01));
  CHECK(half.negative == doctest::Approx(kPi / 2).epsilon(0.01));
  const SignMeasures one = sign_measures(field("1"), {0, 0}, 0.5);
  CHECK(one.positive == doctest::Approx(kPi * 0.25).epsilon(0.01));
  CHECK(one.negative == 0.0);

  // 1D oracle profile u(x) in 2D: {u > 0} is the disk right of x = -1/3
  const SignMeasures seg = sign_measures(field("x+1/3", 129), {0, 0}, 1.0);
  const double d = 1.0 / 3.0;
  const double left = std::acos(d) - d * std::sqrt(1 - d * d);  // circular segment x < -d
  CHECK(seg.negative == doctest::Approx(left).epsilon(0.01));
  CHECK(seg.positive == doctest::Approx(kPi - left).epsilon(0.01));
  CHECK(seg.positive + seg.negative <= kPi * 1.01);
}

TEST_CASE("normal_at") {
  const NormalSample nx = normal_at(field("x"), {0, 0}, 0.25);
  CHECK(nx.nu.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(nx.nu.y) < 1e-12);
  const NormalSample n21 = normal_at(field("2*x+y"), {0, 0}, 0.25);
  CHECK(std::abs(n21.nu.x - 2 / std::sqrt(5.0)) < 1e-10);
  CHECK(std::abs(n21.nu.y - 1 / std::sqrt(5.0)) < 1e-10);
  CHECK(n21.delta == doctest::Approx(std::sqrt(5.0)));
  CHECK(norm(n21.nu) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(normal_at(field("x^2-y^2"), {0, 0}, 0.25), DegenerateGradient);
  CHECK_THROWS_AS(normal_at(field("x"), {0.9, 0}, 0.25), OutOfBounds);

  // any affine field through z
  const NormalSample off = normal_at(field("-0.3*(x-0.2)+0.7*(y+0.1)"), {0.2, -0.1}, 0.2);
  const double len = std::hypot(0.3, 0.7);
  CHECK(std::abs(off.nu.x + 0.3 / len) < 1e-10);
  CHECK(std::abs(off.nu.y - 0.7 / len) < 1e-10);
}

TEST_CASE("nodal normals and the Hoelder modulus") {
  const ScalarField u = field("x");
  const auto m = CoefficientModel::heaviside(parse("2"), parse("1"));
  const NodalSet ns = extract_nodal(u);
  const auto normals = nodal_normals(u, m, ns, 0.25, {0, 0}, 0.5);
  CHECK(normals.size() >= 10);
  CHECK(holder_modulus(normals, 0.5, 2 * u.grid().h(0)) <= 1e-6);

  std::vector<NormalSample> same(3, NormalSample{{0, 0}, {1, 0}, 1.0});
  same[1].z = {0.5, 0};
  same[2].z = {0, 0.5};
  CHECK(holder_modulus(same, 0.5, 0.01) == 0.0);

  std::vector<NormalSample> bent{{{0, 0}, {1, 0}, 1}, {{0.25, 0}, {0, 1}, 1}};
  CHECK(holder_modulus(bent, 0.5, 0.01) == doctest::Approx(std::sqrt(2.0) / 0.5));
  CHECK(holder_modulus(bent, 0.5, 0.3) == 0.0);  // pair closer than the separation
}

TEST_CASE("transforms share the nodal set of u") {
  const ScalarField u = field("sin(2*x)+0.5*y");
  const auto m = CoefficientModel::heaviside(parse("1.5+0.3*y"), parse("0.9"));
  const NodalSet a = extract_nodal(u);
  const NodalSet b = extract_nodal(w_values(u, m));
  // every vertex of one polyline lies within h of the other's vertices
  const double h = u.grid().h(0);
  for (const auto& p : b.points) {
    double best = 1e300;
    for (const auto& q : a.points) best = std::min(best, distance(p.p, q.p));
    CHECK(best <= h);
  }
}
