#include "brokenpde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "brokenpde/errors.hpp"
#include "brokenpde/parallel.hpp"

namespace brokenpde {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

void require_ball_inside(const GridSpec& g, Point z, double r) {
  const bool inside = z.x - r >= g.lo[0] - 1e-12 && z.x + r <= g.hi[0] + 1e-12 &&
                      (g.dim == 1 || (z.y - r >= g.lo[1] - 1e-12 && z.y + r <= g.hi[1] + 1e-12));
  if (!inside) {
    throw OutOfBounds(fmt::format("ball of radius {} about ({}, {}) leaves the grid", r, z.x, z.y));
  }
}

std::complex<double> cpow(std::complex<double> zeta, int k) {
  std::complex<double> out(1.0, 0.0);
  for (int i = 0; i < k; ++i) out *= zeta;
  return out;
}

struct BallFit {
  std::vector<double> re, im;
  double condition = 0.0;
  double residual = 0.0;  ///< max |v - P| over the fitted nodes
  bool ok = false;
};

/// Unscaled coefficients of the harmonic least-squares fit over nodes of B(z, r).
BallFit fit_on_ball(const ScalarField& v, Point z, int d, double r, bool pinned) {
  const GridSpec& g = v.grid();
  const int cols = 2 * d + (pinned ? 0 : 1);
  std::vector<std::size_t> nodes;
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x - r - g.lo[0]) / g.h(0))));
  const int i1 = std::min(g.n[0] - 1, static_cast<int>(std::ceil((z.x + r - g.lo[0]) / g.h(0))));
  const int j0 = std::max(0, static_cast<int>(std::floor((z.y - r - g.lo[1]) / g.h(1))));
  const int j1 = std::min(g.n[1] - 1, static_cast<int>(std::ceil((z.y + r - g.lo[1]) / g.h(1))));
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      if (distance(g.node(i, j), z) <= r) nodes.push_back(g.index(i, j));
    }
  }
  BallFit fit;
  if (nodes.size() < static_cast<std::size_t>(cols)) return fit;

  Eigen::MatrixXd A(static_cast<Eigen::Index>(nodes.size()), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t row = 0; row < nodes.size(); ++row) {
    const Point p = g.node(nodes[row]) - z;
    const std::complex<double> zeta(p.x / r, p.y / r);
    int col = 0;
    if (!pinned) A(static_cast<Eigen::Index>(row), col++) = 1.0;
    for (int k = 1; k <= d; ++k) {
      const std::complex<double> zk = cpow(zeta, k);
      A(static_cast<Eigen::Index>(row), col++) = zk.real();
      A(static_cast<Eigen::Index>(row), col++) = zk.imag();
    }
    b(static_cast<Eigen::Index>(row)) = v[nodes[row]];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  fit.condition = smin > 0.0 ? std::pow(sv(0) / smin, 2) : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd x = svd.solve(b);
  fit.residual = (A * x - b).lpNorm<Eigen::Infinity>();

  fit.re.assign(d + 1, 0.0);
  fit.im.assign(d + 1, 0.0);
  int col = 0;
  if (!pinned) fit.re[0] = x(col++);
  for (int k = 1; k <= d; ++k) {
    const double scale = std::pow(r, k);
    fit.re[k] = x(col++) / scale;
    fit.im[k] = x(col++) / scale;
  }
  fit.ok = true;
  return fit;
}

}  // namespace

double ball_sup(const GridSpec& g, Point z, double r, const std::function<double(Point)>& fn) {
  require_ball_inside(g, z, r);
  const double step = 0.25 * g.min_spacing();
  double best = std::abs(fn(z));
  if (g.dim == 1) {
    const int m = static_cast<int>(std::floor(r / step));
    for (int a = -m; a <= m; ++a) best = std::max(best, std::abs(fn({z.x + a * step, 0.0})));
    best = std::max({best, std::abs(fn({z.x - r, 0.0})), std::abs(fn({z.x + r, 0.0}))});
    return best;
  }
  const int m = static_cast<int>(std::floor(r / step));
  for (int b = -m; b <= m; ++b) {
    for (int a = -m; a <= m; ++a) {
      const double dx = a * step;
      const double dy = b * step;
      if (dx * dx + dy * dy > r * r) continue;
      best = std::max(best, std::abs(fn({z.x + dx, z.y + dy})));
    }
  }
  const int ring = std::max(64, static_cast<int>(std::ceil(8.0 * std::numbers::pi * r / step)));
  for (int k = 0; k < ring; ++k) {
    const double t = 2.0 * std::numbers::pi * k / ring;
    best = std::max(best, std::abs(fn({z.x + r * std::cos(t), z.y + r * std::sin(t)})));
  }
  return best;
}

OrderEstimate vanishing_order(const ScalarField& u, Point z, double r_max, int levels) {
  if (levels < 4) throw InvalidArgument("vanishing_order needs at least 4 levels");
  const GridSpec& g = u.grid();
  const double r_min = r_max * std::ldexp(1.0, -(levels - 1));
  if (r_min < 2.0 * g.min_spacing() * (1.0 - 1e-12)) {
    throw RadiiTooSmall(fmt::format("smallest radius {} is below 2h = {}", r_min,
                                    2.0 * g.min_spacing()));
  }
  OrderEstimate e;
  e.z = z;
  std::vector<double> lx, ly;
  for (int j = 0; j < levels; ++j) {
    const double r = r_max * std::ldexp(1.0, -j);
    const double s = ball_sup(g, z, r, [&](Point p) { return interpolate(u, p); });
    if (!(s > 0.0)) {
      throw InvalidArgument(fmt::format("u vanishes identically on the ball of radius {}", r));
    }
    e.radii.push_back(r);
    e.sups.push_back(s);
    lx.push_back(std::log(r));
    ly.push_back(std::log(s));
  }
  const LineFit fit = least_squares_line(lx, ly);
  e.d_hat = fit.slope;
  e.amplitude = std::exp(fit.intercept);
  e.nearest_integer_gap = std::abs(e.d_hat - std::round(e.d_hat));
  return e;
}

PointClass classify(const OrderEstimate& e, int* order) {
  if (e.d_hat < 1.5) {
    if (order) *order = 1;
    return PointClass::Nondegenerate;
  }
  if (e.nearest_integer_gap <= 0.25) {
    if (order) *order = static_cast<int>(std::lround(e.d_hat));
    return PointClass::Degenerate;
  }
  if (order) *order = 0;
  return PointClass::Unresolved;
}

void classify_nodal(NodalSet& ns, const ScalarField& u, double r_max, int levels) {
  parallel_for(ns.points.size(), [&](std::size_t k) {
    NodalPoint& np = ns.points[k];
    try {
      const OrderEstimate e = vanishing_order(u, np.p, r_max, levels);
      np.cls = classify(e, &np.order);
    } catch (const OutOfBounds&) {
      np.cls = PointClass::Unclassified;
    } catch (const InvalidArgument&) {
      np.cls = PointClass::Unresolved;
    }
  });
}

PolyFit PolyFit::from_coefficients(Point z, std::vector<double> re, std::vector<double> im) {
  if (re.empty() || re.size() != im.size()) {
    throw InvalidArgument("polynomial coefficient lists must be nonempty and equally long");
  }
  PolyFit p;
  p.z = z;
  p.degree = static_cast<int>(re.size()) - 1;
  p.constant_pinned = re[0] == 0.0;
  p.re = std::move(re);
  p.im = std::move(im);
  return p;
}

double PolyFit::evaluate(Point p) const {
  const std::complex<double> zeta(p.x - z.x, p.y - z.y);
  std::complex<double> zk(1.0, 0.0);
  double sum = 0.0;
  for (int k = 0; k <= degree; ++k) {
    sum += re[k] * zk.real() + im[k] * zk.imag();
    zk *= zeta;
  }
  return sum;
}

PolyFit harmonic_fit(const ScalarField& v, Point z, int d, double r_fit, bool pin_constant) {
  const GridSpec& g = v.grid();
  if (g.dim != 2) throw InvalidArgument("harmonic_fit needs a 2D field");
  if (d < 1 || d > 4) throw InvalidArgument("harmonic_fit supports degrees 1 to 4");
  require_ball_inside(g, z, r_fit);

  const BallFit top = fit_on_ball(v, z, d, r_fit, pin_constant);
  if (!top.ok) throw InvalidArgument("too few nodes in the fit ball");
  PolyFit out = PolyFit::from_coefficients(z, top.re, top.im);
  out.constant_pinned = pin_constant;
  out.condition_number = top.condition;
  out.ill_conditioned = top.condition > 1e12;

  std::vector<double> lx, ly;
  for (int j = 0; j < 6; ++j) {
    const double r = r_fit * std::ldexp(1.0, -j);
    if (r < 2.0 * g.min_spacing() * (1.0 - 1e-12)) break;
    const BallFit local = j == 0 ? top : fit_on_ball(v, z, d, r, pin_constant);
    if (!local.ok) break;
    const double res = local.residual;
    out.radii.push_back(r);
    out.residuals.push_back(res);
    if (res > 0.0) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(res));
    }
  }
  out.decay_exponent = lx.size() >= 2 ? least_squares_line(lx, ly).slope
                                      : std::numeric_limits<double>::quiet_NaN();
  return out;
}

int tangent_dim(const PolyFit& p) {
  const int d = p.degree;
  if (d < 1) throw InvalidArgument("tangent_dim needs degree >= 1");
  double scale = 0.0;
  for (int k = 0; k <= d; ++k) scale = std::max({scale, std::abs(p.re[k]), std::abs(p.im[k])});
  // leading part Re(w zeta^d) with w = re - i im
  const std::complex<double> w(p.re[d], -p.im[d]);
  if (scale == 0.0 || std::abs(w) <= 1e-12 * scale) {
    throw ZeroPolynomial("leading homogeneous part vanishes");
  }
  // d_x^a d_y^b (w zeta^d) = w i^b d! zeta for a + b = d - 1; each is the
  // linear form Re(W zeta) with gradient (Re W, -Im W).
  double factorial = 1.0;
  for (int k = 2; k <= d; ++k) factorial *= k;
  Eigen::MatrixXd grads(d, 2);
  std::complex<double> ib(1.0, 0.0);
  for (int b = 0; b < d; ++b) {
    const std::complex<double> W = w * ib * factorial;
    grads(b, 0) = W.real();
    grads(b, 1) = -W.imag();
    ib *= std::complex<double>(0.0, 1.0);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(grads);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv(k) > 1e-10 * sv(0);
  return 2 - rank;
}

FrequencyIntegrands::FrequencyIntegrands(const ScalarField& w)
    : FrequencyIntegrands(w, VectorField(w.grid()), ScalarField(w.grid()), w) {}

FrequencyIntegrands::FrequencyIntegrands(const TransformFields& tf)
    : FrequencyIntegrands(tf.v, tf.b_vec, tf.c, tf.coupled) {}

FrequencyIntegrands::FrequencyIntegrands(const ScalarField& w, const VectorField& b_vec,
                                         const ScalarField& c, const ScalarField& coupled) {
  const GridSpec& g = w.grid();
  if (!(b_vec.grid == g) || !(c.grid() == g) || !(coupled.grid() == g)) {
    throw InvalidArgument("frequency inputs must share one grid");
  }
  const VectorField gw = gradient(w);
  const VectorField gq = gradient(coupled);
  std::vector<double> w2(g.node_count());
  std::vector<double> energy(g.node_count());
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    w2[k] = w[k] * w[k];
    energy[k] = gw.x[k] * gw.x[k] + gw.y[k] * gw.y[k] +
                w[k] * (b_vec.x[k] * gq.x[k] + b_vec.y[k] * gq.y[k]) + c[k] * w[k] * coupled[k];
  }
  w2_ = ScalarField(g, std::move(w2));
  energy_ = ScalarField(g, std::move(energy));
}

double FrequencyIntegrands::H(Point z, double r) const { return circle_integral(w2_, z, r); }

FrequencyValue FrequencyIntegrands::at(Point z, double r) const {
  const double h = H(z, r);
  if (!(h > 1e-14)) {
    throw DegenerateH(fmt::format("H({}) = {} is below the floor 1e-14", r, h), h);
  }
  const double i = disk_integral(energy_, z, r);
  return {r, h, i, r * i / h};
}

FrequencyValue frequency(const TransformFields& tf, Point z, double r) {
  return FrequencyIntegrands(tf).at(z, r);
}

bool FrequencyProfile::any_degenerate() const {
  return std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return e.degenerate_h; });
}

double FrequencyProfile::max_N() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    if (e.flag.empty()) best = std::max(best, e.N);
  }
  return best;
}

FrequencyProfile frequency_profile(const FrequencyIntegrands& data, Point z,
                                   const std::vector<double>& radii) {
  FrequencyProfile profile;
  profile.z = z;
  profile.entries.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t k) {
    FrequencyProfile::Entry& e = profile.entries[k];
    e.r = radii[k];
    e.doubling = std::numeric_limits<double>::quiet_NaN();
    try {
      const FrequencyValue v = data.at(z, e.r);
      e.H = v.H;
      e.I = v.I;
      e.N = v.N;
    } catch (const DegenerateH& err) {
      e.degenerate_h = true;
      e.H = err.h_value();
      e.flag = "DegenerateH";
      return;
    } catch (const Error& err) {
      e.flag = err.what();
      return;
    }
    try {
      e.doubling = data.H(z, 2.0 * e.r) / e.H;
    } catch (const Error&) {
      // 2r leaves the grid; doubling stays NaN
    }
  });
  return profile;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw InvalidArgument("linspace needs at least one step");
  if (steps == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) out[k] = lo + (hi - lo) * k / (steps - 1);
  return out;
}

}  // namespace brokenpde
