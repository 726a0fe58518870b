#pragma once

#include <utility>
#include <vector>

#include "brokenpde/coefficients.hpp"
#include "brokenpde/grid.hpp"

namespace brokenpde {

struct Segment {
  Point a;
  Point b;
  double length() const { return distance(a, b); }
};

enum class PointClass { Unclassified, Nondegenerate, Degenerate, Unresolved };

struct NodalPoint {
  Point p;
  PointClass cls = PointClass::Unclassified;
  int order = 0;  ///< vanishing order when cls == Degenerate
};

/// Polyline approximation of {u = 0}. In 1D `segments` is empty and `points`
/// holds the sign-change locations.
struct NodalSet {
  std::vector<Segment> segments;
  std::vector<NodalPoint> points;  ///< deduplicated segment endpoints

  double total_length() const;
};

struct NormalSample {
  Point z;
  Point nu;            ///< unit normal, pointing into {u > 0}
  double delta = 0.0;  ///< |grad P_z|, the fit amplitude
};

/// Marching squares on the bilinear model of u. Nodes with u == 0 count as
/// the negative phase; saddle cells are split according to the sign of the
/// cell-center value.
NodalSet extract_nodal(const ScalarField& u);

/// Total length of the segments clipped to the closed disk (count of points in 1D).
double nodal_length(const NodalSet& ns, Point center, double radius);

struct SignMeasures {
  double positive = 0.0;
  double negative = 0.0;
};

/// Areas of {u > 0} and {u <= 0} inside the disk, from cell counting with
/// 16x16 supersampling of the bilinear interpolant in cells cut by the
/// circle or by the nodal set (lengths in 1D).
SignMeasures sign_measures(const ScalarField& u, Point center, double radius);

/// Normal to the nodal set at z from the weighted affine fit P_z of v over the
/// nodes of B(z, r_fit), weights 1 - |x - z| / r_fit, with P_z(z) pinned to 0.
/// Throws DegenerateGradient when |grad P_z| <= 1e-8 |v|_inf / r_fit.
NormalSample normal_at(const ScalarField& v, Point z, double r_fit);

/// normal_at at every nodal point inside B(center, radius) whose fit ball
/// lies in the grid, fitting the frozen transform of u at each point (the
/// Heaviside or phi_s map with coefficients taken at that point). Points
/// where the fit is degenerate are skipped.
std::vector<NormalSample> nodal_normals(const ScalarField& u, const CoefficientModel& m,
                                        const NodalSet& ns, double r_fit, Point center,
                                        double radius);

/// max |nu(x) - nu(y)| / |x - y|^alpha over pairs at least min_separation apart.
double holder_modulus(const std::vector<NormalSample>& samples, double alpha,
                      double min_separation);

}  // namespace brokenpde
