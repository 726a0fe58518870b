#include "brokenpde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/log.hpp"

namespace brokenpde {

namespace {

constexpr int kSupersample = 16;

struct CellCoord {
  int index;  // left node of the cell
  double t;   // local coordinate in [0, 1]
};

/// Locates coordinate x on axis `axis`, snapping to nodes so nodal values are reproduced bit-exactly.
CellCoord locate(const GridSpec& g, int axis, double x) {
  const double s = (x - g.lo[axis]) / g.h(axis);
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-10) {
    const int k = static_cast<int>(r);
    if (k >= g.n[axis] - 1) return {g.n[axis] - 2, 1.0};
    return {std::max(k, 0), 0.0};
  }
  int k = static_cast<int>(std::floor(s));
  k = std::clamp(k, 0, g.n[axis] - 2);
  return {k, s - k};
}

void require_inside(const GridSpec& g, Point z, double r) {
  const double slack0 = 1e-12 * (g.hi[0] - g.lo[0]);
  bool inside = z.x - r >= g.lo[0] - slack0 && z.x + r <= g.hi[0] + slack0;
  if (g.dim == 2) {
    const double slack1 = 1e-12 * (g.hi[1] - g.lo[1]);
    inside = inside && z.y - r >= g.lo[1] - slack1 && z.y + r <= g.hi[1] + slack1;
  }
  if (!inside) {
    throw OutOfBounds(fmt::format("ball of radius {} about ({}, {}) leaves the grid", r, z.x, z.y));
  }
}

void require_radius(const GridSpec& g, double r) {
  if (!(r >= 2.0 * g.min_spacing() * (1.0 - 1e-12))) {
    throw InvalidArgument(
        fmt::format("radius {} is below the quadrature floor 2h = {}", r, 2.0 * g.min_spacing()));
  }
}

}  // namespace

GridSpec GridSpec::interval(double lo, double hi, int n) {
  GridSpec g;
  g.dim = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 0.0};
  g.n = {n, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::square(double lo, double hi, int n) {
  GridSpec g;
  g.dim = 2;
  g.lo = {lo, lo};
  g.hi = {hi, hi};
  g.n = {n, n};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 3) throw InvalidArgument("a grid axis needs at least 3 points");
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
      throw InvalidArgument("grid bounds must satisfy lo < hi");
    }
    if (n[a] % 2 == 0 && std::abs(lo[a] + hi[a]) < 1e-12 * (hi[a] - lo[a])) {
      log().warn("axis {} has an even point count; the origin is not a node", a);
    }
  }
  if (dim == 1 && n[1] != 1) throw InvalidArgument("a 1D grid has n[1] == 1");
}

double GridSpec::min_spacing() const { return dim == 1 ? h(0) : std::min(h(0), h(1)); }

bool GridSpec::is_boundary(int i, int j) const {
  if (i == 0 || i == n[0] - 1) return true;
  return dim == 2 && (j == 0 || j == n[1] - 1);
}

bool GridSpec::contains(Point p) const {
  const double s0 = 1e-12 * (hi[0] - lo[0]);
  if (p.x < lo[0] - s0 || p.x > hi[0] + s0) return false;
  if (dim == 1) return true;
  const double s1 = 1e-12 * (hi[1] - lo[1]);
  return p.y >= lo[1] - s1 && p.y <= hi[1] + s1;
}

ScalarField::ScalarField(GridSpec grid) : grid_(grid), values_(grid.node_count(), 0.0) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw InvalidArgument(fmt::format("field has {} values for {} nodes", values_.size(),
                                      grid_.node_count()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
  }
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField VectorField::component(int axis) const {
  return ScalarField(grid, axis == 0 ? x : y);
}

ScalarField sample(const Expr& e, const GridSpec& grid) {
  std::vector<double> values(grid.node_count());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Point p = grid.node(k);
    try {
      values[k] = e.evaluate(p);
    } catch (const EvalError& err) {
      throw EvalError(fmt::format("{} at node ({}, {})", err.what(), p.x, p.y));
    }
  }
  return ScalarField(grid, std::move(values));
}

ScalarField sample(const std::function<double(Point)>& f, const GridSpec& grid) {
  std::vector<double> values(grid.node_count());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = f(grid.node(k));
  return ScalarField(grid, std::move(values));
}

double interpolate(const ScalarField& f, Point p) {
  const GridSpec& g = f.grid();
  if (!g.contains(p)) {
    throw OutOfBounds(fmt::format("point ({}, {}) is outside the grid", p.x, p.y));
  }
  const CellCoord cx = locate(g, 0, p.x);
  if (g.dim == 1) {
    if (cx.t == 0.0) return f(cx.index);
    if (cx.t == 1.0) return f(cx.index + 1);
    return (1.0 - cx.t) * f(cx.index) + cx.t * f(cx.index + 1);
  }
  const CellCoord cy = locate(g, 1, p.y);
  const int i = cx.index;
  const int j = cy.index;
  if (cx.t == 0.0 && cy.t == 0.0) return f(i, j);
  const double tx = cx.t;
  const double ty = cy.t;
  return (1.0 - tx) * (1.0 - ty) * f(i, j) + tx * (1.0 - ty) * f(i + 1, j) +
         (1.0 - tx) * ty * f(i, j + 1) + tx * ty * f(i + 1, j + 1);
}

VectorField gradient(const ScalarField& f) {
  const GridSpec& g = f.grid();
  VectorField out(g);
  auto diff = [&](int axis, int i, int j) {
    const int n = g.n[axis];
    const int k = axis == 0 ? i : j;
    auto at = [&](int m) { return axis == 0 ? f(m, j) : f(i, m); };
    const double h = g.h(axis);
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
  };
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      const std::size_t k = g.index(i, j);
      out.x[k] = diff(0, i, j);
      if (g.dim == 2) out.y[k] = diff(1, i, j);
    }
  }
  return out;
}

double circle_integral(const ScalarField& f, Point z, double r) {
  const GridSpec& g = f.grid();
  require_radius(g, r);
  require_inside(g, z, r);
  if (g.dim == 1) return interpolate(f, {z.x - r, 0.0}) + interpolate(f, {z.x + r, 0.0});
  const int m = std::max(64, static_cast<int>(std::ceil(8.0 * std::numbers::pi * r / g.min_spacing())));
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / m;
    sum += interpolate(f, {z.x + r * std::cos(theta), z.y + r * std::sin(theta)});
  }
  return sum * 2.0 * std::numbers::pi * r / m;
}

double disk_integral(const ScalarField& f, Point z, double r) {
  const GridSpec& g = f.grid();
  require_radius(g, r);
  require_inside(g, z, r);
  if (g.dim == 1) {
    const double a = z.x - r;
    const double b = z.x + r;
    const double h = g.h(0);
    double sum = 0.0;
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      const double x0 = std::max(a, g.node(i).x);
      const double x1 = std::min(b, g.node(i + 1).x);
      if (x1 <= x0) continue;
      const double t = (0.5 * (x0 + x1) - g.node(i).x) / h;
      sum += (x1 - x0) * ((1.0 - t) * f(i) + t * f(i + 1));
    }
    return sum;
  }

  const double hx = g.h(0);
  const double hy = g.h(1);
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x - r - g.lo[0]) / hx)) - 1);
  const int i1 = std::min(g.n[0] - 2, static_cast<int>(std::ceil((z.x + r - g.lo[0]) / hx)) + 1);
  const int j0 = std::max(0, static_cast<int>(std::floor((z.y - r - g.lo[1]) / hy)) - 1);
  const int j1 = std::min(g.n[1] - 2, static_cast<int>(std::ceil((z.y + r - g.lo[1]) / hy)) + 1);
  const double r2 = r * r;
  auto inside = [&](double x, double y) {
    const double dx = x - z.x;
    const double dy = y - z.y;
    return dx * dx + dy * dy <= r2;
  };

  double sum = 0.0;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Point p0 = g.node(i, j);
      const double xa = p0.x, xb = p0.x + hx, ya = p0.y, yb = p0.y + hy;
      const double f00 = f(i, j), f10 = f(i + 1, j), f01 = f(i, j + 1), f11 = f(i + 1, j + 1);
      const int corners_in = inside(xa, ya) + inside(xb, ya) + inside(xa, yb) + inside(xb, yb);
      if (corners_in == 4) {
        sum += hx * hy * 0.25 * (f00 + f10 + f01 + f11);
        continue;
      }
      // nearest point of the cell to z
      const double nx = std::clamp(z.x, xa, xb);
      const double ny = std::clamp(z.y, ya, yb);
      if (!inside(nx, ny)) continue;
      double part = 0.0;
      for (int b = 0; b < kSupersample; ++b) {
        const double ty = (b + 0.5) / kSupersample;
        for (int a = 0; a < kSupersample; ++a) {
          const double tx = (a + 0.5) / kSupersample;
          if (!inside(xa + tx * hx, ya + ty * hy)) continue;
          part += (1.0 - tx) * (1.0 - ty) * f00 + tx * (1.0 - ty) * f10 + (1.0 - tx) * ty * f01 +
                  tx * ty * f11;
        }
      }
      sum += part * hx * hy / (kSupersample * kSupersample);
    }
  }
  return sum;
}

}  // namespace brokenpde
