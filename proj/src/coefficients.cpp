#include "brokenpde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "brokenpde/errors.hpp"

namespace brokenpde {

namespace {

double power_part(double u, double s) { return u > 0.0 ? std::pow(u, s) : 0.0; }

}  // namespace

CoefficientModel CoefficientModel::heaviside(Expr a_plus, Expr a_minus) {
  CoefficientModel m;
  m.s = 0.0;
  m.a_plus = std::move(a_plus);
  m.a_minus = std::move(a_minus);
  return m;
}

CoefficientModel CoefficientModel::power(double s, Expr a, Expr b) {
  CoefficientModel m;
  m.s = s;
  m.a = std::move(a);
  m.b = std::move(b);
  return m;
}

void CoefficientModel::validate() const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("exponent s must be >= 0");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(omega0 > 0.0)) throw InvalidArgument("omega0 must be positive");
}

std::vector<std::pair<std::string, Expr>> CoefficientModel::phase_coefficients() const {
  if (is_heaviside()) return {{"a_plus", a_plus}, {"a_minus", a_minus}};
  return {{"a", a}, {"b", b}};
}

bool CoefficientModel::zero_forcing() const {
  auto zero = [](const Expr& e) { return e.is_constant() && e.evaluate({}) == 0.0; };
  return zero(f_x) && zero(f_y);
}

double evaluate_A(const CoefficientModel& m, Point x, double u) {
  if (m.is_heaviside()) return u > 0.0 ? m.a_plus.evaluate(x) : m.a_minus.evaluate(x);
  return m.a.evaluate(x) + m.b.evaluate(x) * power_part(u, m.s);
}

SampledCoefficients::SampledCoefficients(const CoefficientModel& m, const GridSpec& g)
    : s_(m.s),
      first_(sample(m.is_heaviside() ? m.a_plus : m.a, g)),
      second_(sample(m.is_heaviside() ? m.a_minus : m.b, g)) {}

double SampledCoefficients::A(std::size_t node, double u) const {
  if (s_ == 0.0) return u > 0.0 ? first_[node] : second_[node];
  return first_[node] + second_[node] * power_part(u, s_);
}

StructureReport check_structure(const CoefficientModel& m, const GridSpec& g, std::uint64_t seed,
                                int pairs) {
  StructureReport report;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.node_count() - 1);

  for (const auto& [name, expr] : m.phase_coefficients()) {
    const ScalarField values = sample(expr, g);
    StructureReport::Coefficient c;
    c.name = name;
    const auto [lo, hi] = std::minmax_element(values.values().begin(), values.values().end());
    c.min = *lo;
    c.max = *hi;
    for (int k = 0; k < pairs; ++k) {
      const std::size_t p = pick(rng);
      std::size_t q = pick(rng);
      while (q == p) q = pick(rng);
      const double dist = distance(g.node(p), g.node(q));
      c.holder_quotient =
          std::max(c.holder_quotient, std::abs(values[p] - values[q]) / std::pow(dist, m.alpha));
    }
    c.lower_violation = c.min < m.lambda;
    c.upper_violation = c.max > 1.0 / m.lambda;
    c.holder_violation = c.holder_quotient > 1.05 * m.omega0;
    if (c.lower_violation) {
      report.flags.push_back(fmt::format("{}: minimum {} below lambda {}", name, c.min, m.lambda));
    }
    if (c.upper_violation) {
      report.flags.push_back(
          fmt::format("{}: maximum {} above 1/lambda {}", name, c.max, 1.0 / m.lambda));
    }
    if (c.holder_violation) {
      report.flags.push_back(fmt::format("{}: Hoelder quotient {} exceeds omega0 {}", name,
                                         c.holder_quotient, m.omega0));
    }
    report.coefficients.push_back(std::move(c));
  }

  const ScalarField fx = sample(m.f_x, g);
  const ScalarField fy = sample(m.f_y, g);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    report.max_f = std::max(report.max_f, std::hypot(fx[k], fy[k]));
  }
  report.f_violation = report.max_f > 1.0 / m.lambda;
  if (report.f_violation) {
    report.flags.push_back(
        fmt::format("f: max |f| {} above 1/lambda {}", report.max_f, 1.0 / m.lambda));
  }
  return report;
}

}  // namespace brokenpde
