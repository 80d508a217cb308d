#include "cylab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cylab/errors.hpp"

namespace cylab {

Profile constant_profile(double r) {
  if (!(r > 0.0)) throw ConfigError("constant profile: radius must be positive");
  Profile p;
  p.f = [r](double) { return r; };
  p.df = [](double) { return 0.0; };
  p.ddf = [](double) { return 0.0; };
  p.support_lo = 0.0;
  p.support_hi = 0.0;
  p.name = "flat";
  return p;
}

Profile catenoid_profile() {
  Profile p;
  p.f = [](double v) { return std::cosh(v); };
  p.df = [](double v) { return std::sinh(v); };
  p.ddf = [](double v) { return std::cosh(v); };
  // Curvature never vanishes; report an effectively infinite support via a
  // huge bridge so downstream code treats no region as exactly conical.
  p.support_lo = -1e9;
  p.support_hi = 1e9;
  p.slope_lo = -std::numeric_limits<double>::infinity();
  p.slope_hi = std::numeric_limits<double>::infinity();
  // No step cap: nothing is exactly affine, so the local error estimate never
  // vanishes and the controller already tracks every coefficient feature.
  p.feature_scale = 0.0;
  p.name = "catenoid";
  return p;
}

Profile smoothed_cone_profile(const SmoothedConeParams& prm) {
  const double s1 = prm.slope_in, s2 = prm.slope_out;
  const double a = prm.bridge_lo, b = prm.bridge_hi;
  if (s1 < 0.0 || s2 < 0.0) throw ConfigError("smoothed cone: slopes must be non-negative");
  if (!(s1 + s2 > 0.0)) throw ConfigError("smoothed cone: at least one slope must be positive");
  if (!(a < b)) throw ConfigError("smoothed cone: bridge interval must be non-degenerate");
  if (!(prm.waist_value > 0.0)) throw ConfigError("smoothed cone: waist value must be positive");

  const double h = b - a;
  const double S = s1 + s2;

  // Waist: f'(x*) = 0 with f' = -s1 + S q(x), q(x) = 3x^2 - 2x^3 increasing
  // on [0, 1] from 0 to 1.
  const double target = s1 / S;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double q = mid * mid * (3.0 - 2.0 * mid);
    (q < target ? lo : hi) = mid;
  }
  const double xw = 0.5 * (lo + hi);

  // Antiderivative of f' over the bridge, relative to f(a).
  auto bridge_rise = [s1, S, h](double x) {
    return h * (-s1 * x + S * x * x * x * (1.0 - 0.5 * x));
  };
  const double fa = prm.waist_value - bridge_rise(xw);
  const double fb = fa + bridge_rise(1.0);

  Profile p;
  p.f = [=](double v) {
    if (v <= a) return fa - s1 * (v - a);
    if (v >= b) return fb + s2 * (v - b);
    return fa + bridge_rise((v - a) / h);
  };
  p.df = [=](double v) {
    if (v <= a) return -s1;
    if (v >= b) return s2;
    const double x = (v - a) / h;
    return -s1 + S * x * x * (3.0 - 2.0 * x);
  };
  p.ddf = [=](double v) {
    if (v <= a || v >= b) return 0.0;
    const double x = (v - a) / h;
    return 6.0 * S * x * (1.0 - x) / h;
  };
  p.support_lo = a;
  p.support_hi = b;
  p.slope_lo = -s1;
  p.slope_hi = s2;
  p.feature_scale = 0.5 * h;
  p.name = "smoothed_cone";
  return p;
}

namespace {

struct SplineData {
  std::vector<double> x, y, m;  // m = second derivatives at the nodes
  double slope_lo = 0.0, slope_hi = 0.0;

  std::size_t segment(double v) const {
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    return std::clamp<std::size_t>(i, 1, x.size() - 1) - 1;
  }
};

}  // namespace

Profile spline_profile(const std::vector<double>& v, const std::vector<double>& f) {
  const std::size_t n = v.size();
  if (n < 2 || f.size() != n) throw ConfigError("spline profile: need matching lists, >= 2 nodes");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(v[i] < v[i + 1])) throw ConfigError("spline profile: nodes must be strictly increasing");
  for (double fi : f)
    if (!(fi > 0.0)) throw ConfigError("spline profile: values must be positive");

  auto d = std::make_shared<SplineData>();
  d->x = v;
  d->y = f;
  d->m.assign(n, 0.0);

  if (n > 2) {
    // Natural spline: tridiagonal system for interior second derivatives.
    const std::size_t k = n - 2;
    std::vector<double> diag(k), rhs(k), sub(k), sup(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double h0 = v[i + 1] - v[i], h1 = v[i + 2] - v[i + 1];
      sub[i] = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      sup[i] = h1 / 6.0;
      rhs[i] = (f[i + 2] - f[i + 1]) / h1 - (f[i + 1] - f[i]) / h0;
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    d->m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i >= 1; --i)
      d->m[i] = (rhs[i - 1] - sup[i - 1] * d->m[i + 1]) / diag[i - 1];
  }

  auto eval = [](const SplineData& s, double t, int deriv) {
    const std::size_t i = s.segment(t);
    const double h = s.x[i + 1] - s.x[i];
    const double A = (s.x[i + 1] - t) / h, B = (t - s.x[i]) / h;
    switch (deriv) {
      case 0:
        return A * s.y[i] + B * s.y[i + 1] +
               ((A * A * A - A) * s.m[i] + (B * B * B - B) * s.m[i + 1]) * h * h / 6.0;
      case 1:
        return (s.y[i + 1] - s.y[i]) / h +
               ((3.0 * B * B - 1.0) * s.m[i + 1] - (3.0 * A * A - 1.0) * s.m[i]) * h / 6.0;
      default:
        return A * s.m[i] + B * s.m[i + 1];
    }
  };

  d->slope_lo = eval(*d, v.front(), 1);
  d->slope_hi = eval(*d, v.back(), 1);
  if (d->slope_lo > 0.0 || d->slope_hi < 0.0)
    throw ConfigError("spline profile: end slopes must point outward so f > 0 on all of R");

  const double lo = v.front(), hi = v.back();
  for (int i = 0; i <= 2000; ++i) {
    const double t = lo + (hi - lo) * i / 2000.0;
    if (!(eval(*d, t, 0) > 0.0))
      throw ConfigError("spline profile: interpolant dips to zero inside the data range");
  }

  Profile p;
  p.f = [d, eval, lo, hi](double t) {
    if (t <= lo) return d->y.front() + d->slope_lo * (t - lo);
    if (t >= hi) return d->y.back() + d->slope_hi * (t - hi);
    return eval(*d, t, 0);
  };
  p.df = [d, eval, lo, hi](double t) {
    if (t <= lo) return d->slope_lo;
    if (t >= hi) return d->slope_hi;
    return eval(*d, t, 1);
  };
  p.ddf = [d, eval, lo, hi](double t) {
    if (t <= lo || t >= hi) return 0.0;
    return eval(*d, t, 2);
  };
  p.support_lo = lo;
  p.support_hi = hi;
  p.slope_lo = d->slope_lo;
  p.slope_hi = d->slope_hi;
  double min_gap = hi - lo;
  for (std::size_t i = 0; i + 1 < n; ++i) min_gap = std::min(min_gap, v[i + 1] - v[i]);
  p.feature_scale = 0.5 * min_gap;
  p.name = "spline";
  return p;
}

}  // namespace cylab
