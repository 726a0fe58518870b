#pragma once

#include "brokenpde/coefficients.hpp"
#include "brokenpde/grid.hpp"

namespace brokenpde {

/// A change of variable v of u together with the lower-order fields of the
/// equation v satisfies, written as  Laplace(v) = b_vec . grad(q) + c q.
///
/// For the Heaviside model q is v itself; for s > 0 it is u. `coupled` holds q
/// so frequency computations need not know which regime produced the fields.
struct TransformFields {
  ScalarField v;
  VectorField b_vec;
  ScalarField c;
  ScalarField coupled;
};

/// a_plus(z) u^+ - a_minus(z) u^- node-wise. WrongRegime when s > 0.
ScalarField phi_freeze(const ScalarField& u, Point z, const CoefficientModel& m);

/// (a_plus(z) - a_plus(x)) H(u) + (a_minus(z) - a_minus(x)) (1 - H(u)), with H(0) = 0.
ScalarField sigma_freeze(const ScalarField& u, Point z, const CoefficientModel& m);

/// w = a_plus(x) u^+ - a_minus(x) u^-            (s = 0)
/// w = a(x) u + b(x) (u^+)^(s+1) / (s+1)         (s > 0)
ScalarField w_values(const ScalarField& u, const CoefficientModel& m);

/// w together with its lower-order fields, built from exact expression
/// derivatives. For s = 0:
///   b = grad(a)/a,  c = Laplace(a)/a - |grad a|^2/a^2   on each phase,
/// and for s > 0:
///   b = grad(a) + (u^+)^s grad(b),  c = Laplace(a) + (u^+)^s/(s+1) Laplace(b).
/// Throws NonDifferentiable when a coefficient cannot be differentiated.
TransformFields w_transform(const ScalarField& u, const CoefficientModel& m);

/// phi(u) = a u + b (u^+)^(s+1) / (s+1); strictly increasing for a > 0, b >= 0.
double phi_s(double u, double a, double b, double s);

/// Inverse of phi_s by safeguarded Newton; exactly v / a for v <= 0.
double phi_s_inverse(double v, double a, double b, double s);

/// The Heaviside analogue a_plus u^+ - a_minus u^- and its inverse.
double phi_heaviside(double u, double a_plus, double a_minus);
double phi_heaviside_inverse(double v, double a_plus, double a_minus);

/// phi_s (or the Heaviside map when s = 0) with coefficients frozen at z.
ScalarField phi_frozen(const ScalarField& u, Point z, const CoefficientModel& m);

}  // namespace brokenpde
