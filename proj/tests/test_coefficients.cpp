#include <random>

#include <doctest.h>

#include "brokenpde/coefficients.hpp"
#include "brokenpde/errors.hpp"

using namespace brokenpde;

TEST_CASE("evaluate_A") {
  const auto m0 = CoefficientModel::heaviside(parse("2"), parse("1"));
  CHECK(evaluate_A(m0, {0, 0}, 0.5) == 2.0);
  CHECK(evaluate_A(m0, {0, 0}, 0.0) == 1.0);
  CHECK(evaluate_A(m0, {0, 0}, -3.0) == 1.0);
  const auto m1 = CoefficientModel::power(1.0, parse("1"), parse("1"));
  CHECK(evaluate_A(m1, {0, 0}, 0.5) == 1.5);
  CHECK(evaluate_A(m1, {0, 0}, -0.5) == 1.0);
  const auto mx = CoefficientModel::heaviside(parse("1+x"), parse("2-y"));
  CHECK(evaluate_A(mx, {0.5, 0.25}, 1.0) == 1.5);
  CHECK(evaluate_A(mx, {0.5, 0.25}, -1.0) == 1.75);
}

TEST_CASE("evaluate_A is monotone in u for s > 0 and within [lambda, 2/lambda]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double lambda = 0.5;
  for (double s : {0.5, 1.0, 2.0}) {
    const auto m = CoefficientModel::power(s, parse("1+0.5*x"), parse("0.5+y^2"));
    for (int k = 0; k < 200; ++k) {
      const Point p{u(rng), u(rng)};
      const double a = u(rng), b = u(rng);
      const double lo = std::min(a, b), hi = std::max(a, b);
      CHECK(evaluate_A(m, p, lo) <= evaluate_A(m, p, hi));
      CHECK(evaluate_A(m, p, hi) >= lambda);
      CHECK(evaluate_A(m, p, hi) <= 2.0 / lambda);
    }
  }
}

TEST_CASE("check_structure") {
  const GridSpec g = GridSpec::square(-1, 1, 33);
  auto m = CoefficientModel::heaviside(parse("2"), parse("1"));
  m.lambda = 0.4;
  CHECK(check_structure(m, g).pass());

  m.a_plus = parse("3");
  const StructureReport r = check_structure(m, g);
  CHECK_FALSE(r.pass());
  REQUIRE(r.coefficients.size() == 2);
  CHECK(r.coefficients[0].upper_violation);
  CHECK(r.coefficients[0].max == 3.0);

  auto h = CoefficientModel::heaviside(parse("1 + 0.25*((x^2+y^2)^0.5)^0.5"), parse("1"));
  h.alpha = 0.5;
  h.omega0 = 0.3;
  const StructureReport hr = check_structure(h, g);
  CHECK(hr.pass());
  CHECK(hr.coefficients[0].holder_quotient <= 0.25 + 1e-12);
  CHECK(hr.coefficients[0].holder_quotient > 0.1);

  h.omega0 = 0.1;
  CHECK(check_structure(h, g).coefficients[0].holder_violation);

  auto f = CoefficientModel::heaviside(parse("1"), parse("1"));
  f.f_x = parse("5");
  CHECK(check_structure(f, g).f_violation);

  // same seed, same report
  CHECK(check_structure(h, g, 7).coefficients[0].holder_quotient ==
        check_structure(h, g, 7).coefficients[0].holder_quotient);
}

TEST_CASE("model validation") {
  auto m = CoefficientModel::heaviside(parse("1"), parse("1"));
  CHECK_NOTHROW(m.validate());
  m.lambda = 1.5;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m = CoefficientModel::power(-1.0, parse("1"), parse("1"));
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  CHECK(CoefficientModel::power(1.0, parse("1"), parse("1")).phase_coefficients()[1].first == "b");
  CHECK(CoefficientModel::heaviside(parse("1"), parse("1")).zero_forcing());
}
