#include <cmath>
#include <random>
#include <string>

#include <doctest.h>
#include <fmt/format.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/expr.hpp"

using namespace brokenpde;

namespace {

double at(const std::string& text, double x, double y = 0.0) { return parse(text).evaluate({x, y}); }

// Random expression text over the whole grammar, always evaluable at the
// points used below (no division, bases of fractional powers kept positive).
std::string random_text(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 2);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  switch (pick(rng)) {
    case 0: return fmt::format("{:.3g}", value(rng));
    case 1: return "x";
    case 2: return "y";
    case 3: return "(" + random_text(rng, depth - 1) + "+" + random_text(rng, depth - 1) + ")";
    case 4: return random_text(rng, depth - 1) + "-" + random_text(rng, depth - 1);
    case 5: return random_text(rng, depth - 1) + "*" + random_text(rng, depth - 1);
    case 6: return "-" + random_text(rng, depth - 1);
    case 7: return "(" + random_text(rng, depth - 1) + ")^2";
    case 8: return "sin(" + random_text(rng, depth - 1) + ")";
    default:
      return "max(" + random_text(rng, depth - 1) + ", " + random_text(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("parse literals and arithmetic") {
  const Expr two = parse("2");
  CHECK(two.kind() == Expr::Kind::Constant);
  CHECK(two.constant_value() == 2.0);
  CHECK(at("x^2 - y^2", 3, 1) == 8.0);
  CHECK(at("1 + 0.5*x", 0.2) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(at("exp(0)", 0) == 1.0);
  CHECK(at("  2 *\t(x+1) ", 1) == 4.0);
  CHECK(at("1.5e-1*x", 2) == doctest::Approx(0.3));
  CHECK(at("min(x, y) + max(x, y)", 2, 5) == 7.0);
  CHECK(at("abs(-x)", 3) == 3.0);
  CHECK(at("cos(0)+sin(0)", 0) == 1.0);
  CHECK(at("((x+1.2)^2)^{0.25}", -0.2) == doctest::Approx(1.0));
}

TEST_CASE("precedence and associativity") {
  CHECK(at("2+3*4", 0) == 14.0);
  CHECK(at("-x^2", 2) == -4.0);
  CHECK(at("2^3^2", 0) == 512.0);
  CHECK(at("8/4/2", 0) == 1.0);
  CHECK(at("10-4-3", 0) == 3.0);
  CHECK(at("2*-x", 3) == -6.0);
  CHECK(at("-2^2", 0) == -4.0);
  CHECK(at("2^-1", 0) == 0.5);
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    parse("sin(");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("1 +"), SyntaxError);
  CHECK_THROWS_AS(parse("(x"), SyntaxError);
  CHECK_THROWS_AS(parse("x y"), SyntaxError);
  CHECK_THROWS_AS(parse("min(x)"), SyntaxError);
  CHECK_THROWS_AS(parse("sin(x, y)"), SyntaxError);
  CHECK_THROWS_AS(parse("2 $ 3"), SyntaxError);
  try {
    parse("1 + z");
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse("tan(x)"), UnknownIdentifier);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(at("1/x", 0), EvalError);
  CHECK_THROWS_AS(at("x^-1", 0), EvalError);
  CHECK_THROWS_AS(at("x^0.5", -1), EvalError);
  CHECK_THROWS_AS(at("exp(x)", 1000), EvalError);
  CHECK(at("x^3", -2) == -8.0);
  CHECK(at("x^0.5", 4) == 2.0);
}

TEST_CASE("derivatives of the examples") {
  CHECK(differentiate(parse("x^2 - y^2"), Variable::X).evaluate({1, 0}) == 2.0);
  CHECK(differentiate(parse("x*y"), Variable::Y).evaluate({2, 3}) == 2.0);
  CHECK_THROWS_AS(differentiate(parse("abs(x)"), Variable::X), NonDifferentiable);
  CHECK_THROWS_AS(differentiate(parse("min(x, 1)"), Variable::X), NonDifferentiable);
  // constant subtrees are fine
  CHECK(differentiate(parse("x*abs(-2)"), Variable::X).evaluate({0, 0}) == 2.0);
  CHECK(differentiate(parse("sin(x)"), Variable::X).evaluate({0.3, 0}) == doctest::Approx(std::cos(0.3)));
  CHECK(differentiate(parse("exp(2*y)"), Variable::Y).evaluate({0, 0.1}) ==
        doctest::Approx(2 * std::exp(0.2)));
  CHECK(differentiate(parse("2^x"), Variable::X).evaluate({1, 0}) == doctest::Approx(2 * std::log(2.0)));
  CHECK(differentiate(parse("1/x"), Variable::X).evaluate({2, 0}) == doctest::Approx(-0.25));
  CHECK(laplacian(parse("x^2+y^2")).evaluate({0.7, -0.2}) == doctest::Approx(4.0));
  CHECK(laplacian(parse("x^2-y^2")).evaluate({0.7, -0.2}) == doctest::Approx(0.0));
  CHECK(differentiate(parse("y"), Variable::X).is_constant());
}

TEST_CASE("differentiate matches centred differences on random polynomials") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  std::uniform_int_distribution<int> degree(0, 6);
  for (int trial = 0; trial < 20; ++trial) {
    std::string text = "0";
    for (int term = 0; term < 5; ++term) {
      const int i = degree(rng);
      const int j = std::uniform_int_distribution<int>(0, 6 - i)(rng);
      text += fmt::format(" + {:.4f}*x^{}*y^{}", coeff(rng), i, j);
    }
    const Expr e = parse(text);
    const Expr dx = differentiate(e, Variable::X);
    const Expr dy = differentiate(e, Variable::Y);
    const double step = 1e-5;
    for (int k = 0; k < 100; ++k) {
      const Point p{point(rng), point(rng)};
      const double fdx = (e.evaluate({p.x + step, p.y}) - e.evaluate({p.x - step, p.y})) / (2 * step);
      const double fdy = (e.evaluate({p.x, p.y + step}) - e.evaluate({p.x, p.y - step})) / (2 * step);
      CHECK(std::abs(dx.evaluate(p) - fdx) <= 1e-6 * std::max(1.0, std::abs(fdx)));
      CHECK(std::abs(dy.evaluate(p) - fdy) <= 1e-6 * std::max(1.0, std::abs(fdy)));
    }
  }
}

TEST_CASE("pretty-print round trip") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string text = random_text(rng, 4);
    const Expr e = parse(text);
    const Expr again = parse(e.to_string());
    INFO(text, " -> ", e.to_string());
    CHECK(structurally_equal(e, again));
    CHECK(again.evaluate({0.3, -0.7}) == e.evaluate({0.3, -0.7}));
  }
}

TEST_CASE("constant folding only touches constants") {
  CHECK(parse("2*3+1").is_constant());
  CHECK(parse("2*3+1").evaluate({}) == 7.0);
  CHECK(parse("x*0").evaluate({5, 0}) == 0.0);
  CHECK(structurally_equal(parse("x+1"), parse("x + 1")));
  CHECK_FALSE(structurally_equal(parse("x+1"), parse("1+x")));
}
