#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brokenpde/expr.hpp"
#include "brokenpde/grid.hpp"

namespace brokenpde {

/// The broken conductivity A_s(x, u).
///
/// s == 0: A(x, u) = a_plus(x) when u > 0 and a_minus(x) otherwise.
/// s  > 0: A(x, u) = a(x) + b(x) * max(u, 0)^s.
///
/// lambda, alpha and omega0 are declared structure data; they are audited by
/// check_structure, never enforced.
struct CoefficientModel {
  double s = 0.0;
  Expr a_plus = Expr::constant(1.0);
  Expr a_minus = Expr::constant(1.0);
  Expr a = Expr::constant(1.0);
  Expr b = Expr::constant(0.0);
  Expr f_x = Expr::constant(0.0);
  Expr f_y = Expr::constant(0.0);
  double lambda = 0.5;
  double alpha = 0.5;
  double omega0 = 1.0;

  static CoefficientModel heaviside(Expr a_plus, Expr a_minus);
  static CoefficientModel power(double s, Expr a, Expr b);

  bool is_heaviside() const { return s == 0.0; }
  /// Throws InvalidArgument for s < 0 or declared data outside its range.
  void validate() const;
  /// The two x-dependent coefficient expressions with their config names:
  /// (a_plus, a_minus) when s == 0, (a, b) otherwise.
  std::vector<std::pair<std::string, Expr>> phase_coefficients() const;
  /// True when f is identically zero as an expression.
  bool zero_forcing() const;
};

double evaluate_A(const CoefficientModel& m, Point x, double u);

/// The phase coefficients sampled once on a grid so A can be evaluated per node cheaply.
class SampledCoefficients {
public:
  SampledCoefficients(const CoefficientModel& m, const GridSpec& g);

  double A(std::size_t node, double u) const;
  const ScalarField& first() const { return first_; }
  const ScalarField& second() const { return second_; }

private:
  double s_;
  ScalarField first_;
  ScalarField second_;
};

struct StructureReport {
  struct Coefficient {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    double holder_quotient = 0.0;  ///< max |c(x)-c(y)| / |x-y|^alpha over the sampled pairs
    bool lower_violation = false;  ///< min < lambda
    bool upper_violation = false;  ///< max > 1/lambda
    bool holder_violation = false; ///< quotient > 1.05 * omega0
  };
  std::vector<Coefficient> coefficients;
  double max_f = 0.0;
  bool f_violation = false;
  std::vector<std::string> flags;

  bool pass() const { return flags.empty(); }
};

/// Audits the lambda bounds, |f| <= 1/lambda and the declared Hoelder data
/// over the nodes of g, using `pairs` random node pairs for the Hoelder quotient.
StructureReport check_structure(const CoefficientModel& m, const GridSpec& g,
                                std::uint64_t seed = 42, int pairs = 500);

}  // namespace brokenpde
