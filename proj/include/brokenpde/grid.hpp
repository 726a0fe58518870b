#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "brokenpde/expr.hpp"
#include "brokenpde/point.hpp"

namespace brokenpde {

/// Uniform tensor grid on an interval (dim 1) or a rectangle (dim 2).
///
/// Node (i, j) sits at (lo[0] + i*h(0), lo[1] + j*h(1)); storage is row-major
/// with i fastest. In 1D only axis 0 is used and n[1] == 1.
struct GridSpec {
  int dim = 2;
  std::array<double, 2> lo{-1.0, -1.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> n{65, 65};

  static GridSpec interval(double lo, double hi, int n);
  static GridSpec square(double lo, double hi, int n);

  /// Throws InvalidArgument unless dim is 1 or 2, every used axis has at
  /// least 3 points and positive extent.
  void validate() const;

  double h(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
  /// Smallest spacing over the used axes.
  double min_spacing() const;
  std::size_t node_count() const { return static_cast<std::size_t>(n[0]) * n[1]; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * n[0] + static_cast<std::size_t>(i);
  }
  Point node(int i, int j = 0) const {
    return {lo[0] + i * h(0), dim == 2 ? lo[1] + j * h(1) : 0.0};
  }
  Point node(std::size_t flat) const {
    return node(static_cast<int>(flat % n[0]), static_cast<int>(flat / n[0]));
  }
  bool is_boundary(int i, int j = 0) const;
  /// Whether p lies in the closed domain, up to a 1e-12 relative slack.
  bool contains(Point p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Nodal samples of a real function on a grid; all values finite.
class ScalarField {
public:
  ScalarField() = default;
  /// Zero field.
  explicit ScalarField(GridSpec grid);
  ScalarField(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator()(int i, int j = 0) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j = 0) { return values_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  double max_abs() const;

private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Per-node vectors with `dim` components (the y component is zero in 1D).
struct VectorField {
  GridSpec grid;
  std::vector<double> x;
  std::vector<double> y;

  VectorField() = default;
  explicit VectorField(GridSpec g)
      : grid(g), x(g.node_count(), 0.0), y(g.node_count(), 0.0) {}

  Point operator[](std::size_t k) const { return {x[k], y[k]}; }
  ScalarField component(int axis) const;
};

/// Samples e at every node. EvalError messages carry the failing node.
ScalarField sample(const Expr& e, const GridSpec& grid);
ScalarField sample(const std::function<double(Point)>& f, const GridSpec& grid);

/// Bilinear (linear in 1D) interpolation. Exact at nodes and on affine data.
double interpolate(const ScalarField& f, Point p);

/// Centered differences inside, second-order one-sided differences on the boundary.
VectorField gradient(const ScalarField& f);

/// Trapezoid rule for the integral of f over the circle |x - z| = r using
/// max(64, ceil(8*pi*r/h)) equispaced angles; in 1D, f(z - r) + f(z + r).
/// Requires r >= 2h and the circle inside the grid.
double circle_integral(const ScalarField& f, Point z, double r);

/// Integral of f over the disk |x - z| <= r (an interval in 1D). Interior
/// cells use the midpoint rule; cells cut by the circle are supersampled 16x16.
double disk_integral(const ScalarField& f, Point z, double r);

}  // namespace brokenpde
