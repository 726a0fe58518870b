#pragma once

#include <functional>
#include <string>
#include <vector>

#include "brokenpde/grid.hpp"
#include "brokenpde/nodal.hpp"
#include "brokenpde/transforms.hpp"

namespace brokenpde {

// ---------------------------------------------------------------------------
// Vanishing order

/// Growth of sup_{B_r(z)} |u| over dyadic radii and its log-log slope.
struct OrderEstimate {
  Point z;
  std::vector<double> radii;  ///< r_max * 2^-j, strictly decreasing
  std::vector<double> sups;
  double d_hat = 0.0;
  double amplitude = 0.0;  ///< exp(intercept) of the log-log fit
  double nearest_integer_gap = 0.0;
};

/// sup of |fn| over the closed disk, sampled on a lattice of spacing h/4
/// together with a dense ring on the circle.
double ball_sup(const GridSpec& g, Point z, double r, const std::function<double(Point)>& fn);

/// Radii r_max * 2^-j, j < levels, must all be >= 2h (else RadiiTooSmall); levels >= 4.
OrderEstimate vanishing_order(const ScalarField& u, Point z, double r_max, int levels);

/// Nondegenerate when d_hat < 1.5; Degenerate(round(d_hat)) when the gap to
/// the nearest integer is at most 0.25; Unresolved otherwise.
PointClass classify(const OrderEstimate& e, int* order = nullptr);

/// Fills the classification slot of every nodal point whose dyadic balls fit in the grid.
void classify_nodal(NodalSet& ns, const ScalarField& u, double r_max, int levels);

// ---------------------------------------------------------------------------
// Harmonic polynomial fits

/// P(x) = sum_k re[k] Re((x - z)^k) + im[k] Im((x - z)^k) in complex notation.
struct PolyFit {
  Point z;
  int degree = 0;
  bool constant_pinned = true;
  std::vector<double> re;  ///< size degree + 1; re[0] is the constant term
  std::vector<double> im;  ///< size degree + 1; im[0] == 0
  std::vector<double> radii;
  std::vector<double> residuals;  ///< max |v - P_r| over the nodes of B_r, P_r refit on each ball
  double decay_exponent = 0.0;
  double condition_number = 0.0;  ///< of the normal equations at the largest radius
  bool ill_conditioned = false;   ///< condition_number > 1e12

  static PolyFit from_coefficients(Point z, std::vector<double> re, std::vector<double> im);
  double evaluate(Point p) const;
};

/// Least-squares fit of v over the nodes of B(z, r_fit) in the harmonic
/// basis Re/Im (x - z)^k, k <= d (d <= 4), with the constant pinned to zero
/// when pin_constant is set. The residual profile refits on halving radii
/// down to 2h; decay_exponent is its log-log slope.
PolyFit harmonic_fit(const ScalarField& v, Point z, int d, double r_fit, bool pin_constant = true);

/// Dimension of the set where all derivatives of order < d of the leading
/// homogeneous part vanish: 1 for d = 1, 0 for d >= 2 in the plane.
/// Throws ZeroPolynomial when the degree-d coefficients vanish.
int tangent_dim(const PolyFit& p);

// ---------------------------------------------------------------------------
// Frequency

struct FrequencyValue {
  double r = 0.0;
  double H = 0.0;
  double I = 0.0;
  double N = 0.0;
};

/// Nodal integrands of H and I for a fixed w and lower-order terms:
///   H(r) = int_{|x-z|=r} w^2,
///   I(r) = int_{|x-z|<r} |grad w|^2 + w (b . grad q) + c w q.
class FrequencyIntegrands {
public:
  /// Zero lower-order terms.
  explicit FrequencyIntegrands(const ScalarField& w);
  FrequencyIntegrands(const ScalarField& w, const VectorField& b_vec, const ScalarField& c,
                      const ScalarField& coupled);
  explicit FrequencyIntegrands(const TransformFields& tf);

  double H(Point z, double r) const;
  /// Throws DegenerateH when H(r) <= 1e-14.
  FrequencyValue at(Point z, double r) const;
  const GridSpec& grid() const { return w2_.grid(); }

private:
  ScalarField w2_;
  ScalarField energy_;
};

FrequencyValue frequency(const TransformFields& tf, Point z, double r);

struct FrequencyProfile {
  struct Entry {
    double r = 0.0;
    double H = 0.0;
    double I = 0.0;
    double N = 0.0;
    double doubling = 0.0;  ///< H(2r) / H(r); NaN when 2r leaves the grid
    bool degenerate_h = false;
    std::string flag;
  };
  Point z;
  std::vector<Entry> entries;

  bool any_degenerate() const;
  /// max_r N(r) over the entries without flags.
  double max_N() const;
};

/// Per-radius values; failures become flags and never abort the profile.
FrequencyProfile frequency_profile(const FrequencyIntegrands& data, Point z,
                                   const std::vector<double>& radii);

std::vector<double> linspace(double lo, double hi, int steps);

}  // namespace brokenpde
