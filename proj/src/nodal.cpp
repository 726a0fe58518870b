#include "brokenpde/nodal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/transforms.hpp"

namespace brokenpde {

namespace {

constexpr int kSupersample = 16;

bool positive(double v) { return v > 0.0; }

Point edge_root(Point pa, double ua, Point pb, double ub) {
  const double t = ua / (ua - ub);
  return pa + t * (pb - pa);
}

class PointIndex {
public:
  explicit PointIndex(double quantum) : quantum_(quantum) {}

  void add(Point p) {
    const auto key = std::make_pair(std::llround(p.x / quantum_), std::llround(p.y / quantum_));
    points_.emplace(key, p);
  }

  std::vector<NodalPoint> take() const {
    std::vector<NodalPoint> out;
    out.reserve(points_.size());
    for (const auto& [key, p] : points_) out.push_back({p});
    return out;
  }

private:
  double quantum_;
  std::map<std::pair<long long, long long>, Point> points_;
};

/// Parameter interval of the segment inside the closed disk, or empty.
bool clip_to_disk(const Segment& s, Point c, double r, double& t0, double& t1) {
  const Point d = s.b - s.a;
  const Point f = s.a - c;
  const double A = dot(d, d);
  const double B = 2.0 * dot(f, d);
  const double C = dot(f, f) - r * r;
  if (A == 0.0) return false;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return false;
  const double sq = std::sqrt(disc);
  t0 = std::max(0.0, (-B - sq) / (2.0 * A));
  t1 = std::min(1.0, (-B + sq) / (2.0 * A));
  return t1 > t0;
}

struct GradientFit {
  Point gradient;
  bool ok = false;
};

/// Weighted least squares for v(x) ~ g . (x - z) over nodes with |x - z| < r.
template <typename ValueFn>
GradientFit fit_gradient(const GridSpec& g, Point z, double r, ValueFn&& value) {
  double sxx = 0, sxy = 0, syy = 0, sxv = 0, syv = 0;
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x - r - g.lo[0]) / g.h(0))));
  const int i1 = std::min(g.n[0] - 1, static_cast<int>(std::ceil((z.x + r - g.lo[0]) / g.h(0))));
  int j0 = 0, j1 = 0;
  if (g.dim == 2) {
    j0 = std::max(0, static_cast<int>(std::floor((z.y - r - g.lo[1]) / g.h(1))));
    j1 = std::min(g.n[1] - 1, static_cast<int>(std::ceil((z.y + r - g.lo[1]) / g.h(1))));
  }
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Point d = g.node(i, j) - z;
      const double dist = norm(d);
      if (dist >= r) continue;
      const double w = 1.0 - dist / r;
      const double v = value(g.index(i, j));
      sxx += w * d.x * d.x;
      sxy += w * d.x * d.y;
      syy += w * d.y * d.y;
      sxv += w * d.x * v;
      syv += w * d.y * v;
    }
  }
  GradientFit fit;
  if (g.dim == 1) {
    if (sxx <= 0.0) return fit;
    fit.gradient = {sxv / sxx, 0.0};
    fit.ok = true;
    return fit;
  }
  const double det = sxx * syy - sxy * sxy;
  if (!(det > 0.0)) return fit;
  fit.gradient = {(syy * sxv - sxy * syv) / det, (sxx * syv - sxy * sxv) / det};
  fit.ok = true;
  return fit;
}

bool fit_ball_inside(const GridSpec& g, Point z, double r) {
  if (z.x - r < g.lo[0] || z.x + r > g.hi[0]) return false;
  return g.dim == 1 || (z.y - r >= g.lo[1] && z.y + r <= g.hi[1]);
}

}  // namespace

double NodalSet::total_length() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.length();
  return sum;
}

NodalSet extract_nodal(const ScalarField& u) {
  const GridSpec& g = u.grid();
  NodalSet ns;
  PointIndex index(1e-9 * g.min_spacing());

  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      if (positive(u(i)) != positive(u(i + 1))) {
        index.add(edge_root(g.node(i), u(i), g.node(i + 1), u(i + 1)));
      }
    }
    ns.points = index.take();
    return ns;
  }

  // corners counter-clockwise from (i, j); edge k joins corner k and k+1
  static constexpr std::array<std::array<int, 2>, 4> kCorner{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  for (int j = 0; j + 1 < g.n[1]; ++j) {
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      std::array<Point, 4> p;
      std::array<double, 4> v;
      std::array<bool, 4> pos;
      int npos = 0;
      for (int k = 0; k < 4; ++k) {
        p[k] = g.node(i + kCorner[k][0], j + kCorner[k][1]);
        v[k] = u(i + kCorner[k][0], j + kCorner[k][1]);
        pos[k] = positive(v[k]);
        npos += pos[k];
      }
      if (npos == 0 || npos == 4) continue;

      std::array<Point, 4> root;
      std::array<bool, 4> crossed{};
      for (int e = 0; e < 4; ++e) {
        const int a = e;
        const int b = (e + 1) % 4;
        if (pos[a] != pos[b]) {
          crossed[e] = true;
          root[e] = edge_root(p[a], v[a], p[b], v[b]);
        }
      }
      auto emit = [&](int e0, int e1) {
        ns.segments.push_back({root[e0], root[e1]});
        index.add(root[e0]);
        index.add(root[e1]);
      };
      const bool saddle = crossed[0] && crossed[1] && crossed[2] && crossed[3];
      if (!saddle) {
        int first = -1;
        for (int e = 0; e < 4; ++e) {
          if (!crossed[e]) continue;
          if (first < 0) {
            first = e;
          } else {
            emit(first, e);
          }
        }
        continue;
      }
      // Cut off the corners whose sign differs from the cell center.
      const bool center_pos = positive(0.25 * (v[0] + v[1] + v[2] + v[3]));
      for (int k = 0; k < 4; ++k) {
        if (pos[k] != center_pos) emit((k + 3) % 4, k);
      }
    }
  }
  ns.points = index.take();
  return ns;
}

double nodal_length(const NodalSet& ns, Point center, double radius) {
  if (ns.segments.empty()) {
    double count = 0.0;
    for (const auto& p : ns.points) count += distance(p.p, center) <= radius ? 1.0 : 0.0;
    return count;
  }
  double sum = 0.0;
  for (const auto& s : ns.segments) {
    double t0 = 0.0, t1 = 0.0;
    if (clip_to_disk(s, center, radius, t0, t1)) sum += (t1 - t0) * s.length();
  }
  return sum;
}

SignMeasures sign_measures(const ScalarField& u, Point center, double radius) {
  const GridSpec& g = u.grid();
  SignMeasures out;
  const double r2 = radius * radius;

  if (g.dim == 1) {
    const double h = g.h(0);
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      const double x0 = g.node(i).x;
      for (int a = 0; a < kSupersample; ++a) {
        const double t = (a + 0.5) / kSupersample;
        const double x = x0 + t * h;
        if (std::abs(x - center.x) > radius) continue;
        const double val = (1.0 - t) * u(i) + t * u(i + 1);
        (positive(val) ? out.positive : out.negative) += h / kSupersample;
      }
    }
    return out;
  }

  const double hx = g.h(0);
  const double hy = g.h(1);
  const double cell = hx * hy;
  auto inside = [&](double x, double y) {
    const double dx = x - center.x;
    const double dy = y - center.y;
    return dx * dx + dy * dy <= r2;
  };
  for (int j = 0; j + 1 < g.n[1]; ++j) {
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      const Point p0 = g.node(i, j);
      const double xa = p0.x, xb = p0.x + hx, ya = p0.y, yb = p0.y + hy;
      if (!inside(std::clamp(center.x, xa, xb), std::clamp(center.y, ya, yb))) continue;
      const double f00 = u(i, j), f10 = u(i + 1, j), f01 = u(i, j + 1), f11 = u(i + 1, j + 1);
      const int npos = positive(f00) + positive(f10) + positive(f01) + positive(f11);
      const bool whole = inside(xa, ya) && inside(xb, ya) && inside(xa, yb) && inside(xb, yb);
      if (whole && (npos == 0 || npos == 4)) {
        (npos == 4 ? out.positive : out.negative) += cell;
        continue;
      }
      for (int b = 0; b < kSupersample; ++b) {
        const double ty = (b + 0.5) / kSupersample;
        for (int a = 0; a < kSupersample; ++a) {
          const double tx = (a + 0.5) / kSupersample;
          if (!inside(xa + tx * hx, ya + ty * hy)) continue;
          const double val = (1.0 - tx) * (1.0 - ty) * f00 + tx * (1.0 - ty) * f10 +
                             (1.0 - tx) * ty * f01 + tx * ty * f11;
          (positive(val) ? out.positive : out.negative) += cell / (kSupersample * kSupersample);
        }
      }
    }
  }
  return out;
}

NormalSample normal_at(const ScalarField& v, Point z, double r_fit) {
  const GridSpec& g = v.grid();
  if (!fit_ball_inside(g, z, r_fit)) {
    throw OutOfBounds(fmt::format("fit ball of radius {} about ({}, {}) leaves the grid", r_fit,
                                  z.x, z.y));
  }
  const GradientFit fit = fit_gradient(g, z, r_fit, [&](std::size_t k) { return v[k]; });
  const double amplitude = fit.ok ? norm(fit.gradient) : 0.0;
  if (!(amplitude > 1e-8 * v.max_abs() / r_fit)) {
    throw DegenerateGradient(
        fmt::format("degenerate gradient {} at ({}, {})", amplitude, z.x, z.y), amplitude);
  }
  return {z, (1.0 / amplitude) * fit.gradient, amplitude};
}

std::vector<NormalSample> nodal_normals(const ScalarField& u, const CoefficientModel& m,
                                        const NodalSet& ns, double r_fit, Point center,
                                        double radius) {
  const GridSpec& g = u.grid();
  double umax = 0.0, umin = 0.0;
  for (double val : u.values()) {
    umax = std::max(umax, val);
    umin = std::min(umin, val);
  }
  std::vector<NormalSample> out;
  for (const NodalPoint& np : ns.points) {
    const Point z = np.p;
    if (distance(z, center) > radius || !fit_ball_inside(g, z, r_fit)) continue;
    double vmax = 0.0;
    GradientFit fit;
    if (m.is_heaviside()) {
      const double ap = m.a_plus.evaluate(z);
      const double am = m.a_minus.evaluate(z);
      vmax = std::max(ap * umax, -am * umin);
      fit = fit_gradient(g, z, r_fit, [&](std::size_t k) { return phi_heaviside(u[k], ap, am); });
    } else {
      const double a = m.a.evaluate(z);
      const double b = m.b.evaluate(z);
      vmax = std::max(std::abs(phi_s(umax, a, b, m.s)), std::abs(phi_s(umin, a, b, m.s)));
      fit = fit_gradient(g, z, r_fit, [&](std::size_t k) { return phi_s(u[k], a, b, m.s); });
    }
    const double amplitude = fit.ok ? norm(fit.gradient) : 0.0;
    if (!(amplitude > 1e-8 * vmax / r_fit)) continue;
    out.push_back({z, (1.0 / amplitude) * fit.gradient, amplitude});
  }
  return out;
}

double holder_modulus(const std::vector<NormalSample>& samples, double alpha,
                      double min_separation) {
  double best = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      const double d = distance(samples[a].z, samples[b].z);
      if (d < min_separation) continue;
      best = std::max(best, distance(samples[a].nu, samples[b].nu) / std::pow(d, alpha));
    }
  }
  return best;
}

}  // namespace brokenpde
