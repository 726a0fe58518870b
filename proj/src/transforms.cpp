#include "brokenpde/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "brokenpde/errors.hpp"

namespace brokenpde {

namespace {

void require_heaviside(const CoefficientModel& m, const char* what) {
  if (!m.is_heaviside()) throw WrongRegime(std::string(what) + " needs the s = 0 model");
}

double positive_power(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

struct DerivativeFields {
  ScalarField value, dx, dy, lap;
};

DerivativeFields sample_with_derivatives(const Expr& e, const GridSpec& g) {
  const Expr dx = differentiate(e, Variable::X);
  const Expr dy = differentiate(e, Variable::Y);
  const Expr lap = differentiate(dx, Variable::X) + differentiate(dy, Variable::Y);
  return {sample(e, g), sample(dx, g), sample(dy, g), sample(lap, g)};
}

}  // namespace

ScalarField phi_freeze(const ScalarField& u, Point z, const CoefficientModel& m) {
  require_heaviside(m, "phi_freeze");
  const double ap = m.a_plus.evaluate(z);
  const double am = m.a_minus.evaluate(z);
  ScalarField v(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) v[k] = phi_heaviside(u[k], ap, am);
  return v;
}

ScalarField sigma_freeze(const ScalarField& u, Point z, const CoefficientModel& m) {
  require_heaviside(m, "sigma_freeze");
  const double ap = m.a_plus.evaluate(z);
  const double am = m.a_minus.evaluate(z);
  const ScalarField plus = sample(m.a_plus, u.grid());
  const ScalarField minus = sample(m.a_minus, u.grid());
  ScalarField sigma(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) {
    sigma[k] = u[k] > 0.0 ? ap - plus[k] : am - minus[k];
  }
  return sigma;
}

ScalarField w_values(const ScalarField& u, const CoefficientModel& m) {
  const GridSpec& g = u.grid();
  ScalarField w(g);
  if (m.is_heaviside()) {
    const ScalarField plus = sample(m.a_plus, g);
    const ScalarField minus = sample(m.a_minus, g);
    for (std::size_t k = 0; k < u.size(); ++k) {
      w[k] = u[k] > 0.0 ? plus[k] * u[k] : minus[k] * u[k];
    }
    return w;
  }
  const ScalarField a = sample(m.a, g);
  const ScalarField b = sample(m.b, g);
  for (std::size_t k = 0; k < u.size(); ++k) {
    w[k] = a[k] * u[k] + b[k] * positive_power(u[k], m.s + 1.0) / (m.s + 1.0);
  }
  return w;
}

TransformFields w_transform(const ScalarField& u, const CoefficientModel& m) {
  const GridSpec& g = u.grid();
  TransformFields out{w_values(u, m), VectorField(g), ScalarField(g), ScalarField(g)};
  if (m.is_heaviside()) {
    const DerivativeFields plus = sample_with_derivatives(m.a_plus, g);
    const DerivativeFields minus = sample_with_derivatives(m.a_minus, g);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const DerivativeFields& a = u[k] > 0.0 ? plus : minus;
      const double inv = 1.0 / a.value[k];
      out.b_vec.x[k] = a.dx[k] * inv;
      out.b_vec.y[k] = a.dy[k] * inv;
      const double grad2 = a.dx[k] * a.dx[k] + a.dy[k] * a.dy[k];
      out.c[k] = a.lap[k] * inv - grad2 * inv * inv;
    }
    out.coupled = out.v;
    return out;
  }
  const DerivativeFields a = sample_with_derivatives(m.a, g);
  const DerivativeFields b = sample_with_derivatives(m.b, g);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double us = positive_power(u[k], m.s);
    out.b_vec.x[k] = a.dx[k] + us * b.dx[k];
    out.b_vec.y[k] = a.dy[k] + us * b.dy[k];
    out.c[k] = a.lap[k] + us / (m.s + 1.0) * b.lap[k];
  }
  out.coupled = u;
  return out;
}

double phi_s(double u, double a, double b, double s) {
  return a * u + b * positive_power(u, s + 1.0) / (s + 1.0);
}

double phi_s_inverse(double v, double a, double b, double s) {
  if (!(a > 0.0) || b < 0.0 || s < 0.0) {
    throw InvalidArgument("phi_s_inverse needs a > 0, b >= 0, s >= 0");
  }
  if (v <= 0.0) return v / a;
  const double tol = 1e-13 * std::max(1.0, std::abs(v));
  // phi(u) >= a u, so the root lies in [0, v / a]
  double lo = 0.0;
  double hi = v / a;
  double u = hi;
  for (int it = 0; it < 200; ++it) {
    const double f = phi_s(u, a, b, s) - v;
    if (std::abs(f) <= tol) return u;
    if (f > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double slope = a + b * positive_power(u, s);
    double next = u - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == u) break;
    u = next;
  }
  return u;
}

double phi_heaviside(double u, double a_plus, double a_minus) {
  return u > 0.0 ? a_plus * u : a_minus * u;
}

double phi_heaviside_inverse(double v, double a_plus, double a_minus) {
  return v > 0.0 ? v / a_plus : v / a_minus;
}

ScalarField phi_frozen(const ScalarField& u, Point z, const CoefficientModel& m) {
  if (m.is_heaviside()) return phi_freeze(u, z, m);
  const double a = m.a.evaluate(z);
  const double b = m.b.evaluate(z);
  ScalarField v(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) v[k] = phi_s(u[k], a, b, m.s);
  return v;
}

}  // namespace brokenpde
