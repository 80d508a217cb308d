#pragma once

// Test-side reference implementations, kept deliberately independent of the
// library: plain finite differences for curvature, closed-form developments
// of cones onto the plane, and closed-form Riccati solutions.  Tests compare
// library output against these.

#include <cmath>
#include <functional>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846264338327950288;

// ---- curvature from raw metric coefficients, pure 2nd-order stencils ----

struct Coeffs {
  double E, F, G;
};
using CoeffFn = std::function<Coeffs(double, double)>;

// Brioschi formula with every derivative taken by central differences of the
// raw coefficients.  Step chosen so truncation ~ roundoff for smooth input.
inline double fd_gauss_curvature(const CoeffFn& g, double u, double v, double h = 2e-4) {
  auto E = [&](double a, double b) { return g(a, b).E; };
  auto F = [&](double a, double b) { return g(a, b).F; };
  auto G = [&](double a, double b) { return g(a, b).G; };
  auto du = [&](auto f, double a, double b) {
    return (-f(a + 2 * h, b) + 8 * f(a + h, b) - 8 * f(a - h, b) + f(a - 2 * h, b)) / (12 * h);
  };
  auto dv = [&](auto f, double a, double b) {
    return (-f(a, b + 2 * h) + 8 * f(a, b + h) - 8 * f(a, b - h) + f(a, b - 2 * h)) / (12 * h);
  };
  auto duu = [&](auto f, double a, double b) {
    return (-f(a + 2 * h, b) + 16 * f(a + h, b) - 30 * f(a, b) + 16 * f(a - h, b) -
            f(a - 2 * h, b)) /
           (12 * h * h);
  };
  auto dvv = [&](auto f, double a, double b) {
    return (-f(a, b + 2 * h) + 16 * f(a, b + h) - 30 * f(a, b) + 16 * f(a, b - h) -
            f(a, b - 2 * h)) /
           (12 * h * h);
  };
  auto duv = [&](auto f, double a, double b) {
    return (f(a + h, b + h) - f(a + h, b - h) - f(a - h, b + h) + f(a - h, b - h)) /
           (4 * h * h);
  };

  const double e = E(u, v), f_ = F(u, v), gg = G(u, v);
  const double Eu = du(E, u, v), Ev = dv(E, u, v);
  const double Fu = du(F, u, v), Fv = dv(F, u, v);
  const double Gu = du(G, u, v), Gv = dv(G, u, v);
  const double Evv = dvv(E, u, v), Guu = duu(G, u, v), Fuv = duv(F, u, v);

  const double W = e * gg - f_ * f_;
  auto det3 = [](double m00, double m01, double m02, double m10, double m11, double m12,
                 double m20, double m21, double m22) {
    return m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
           m02 * (m10 * m21 - m11 * m20);
  };
  const double d1 = det3(-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
                         Fv - 0.5 * Gu, e, f_,
                         0.5 * Gv, f_, gg);
  const double d2 = det3(0.0, 0.5 * Ev, 0.5 * Gu,
                         0.5 * Ev, e, f_,
                         0.5 * Gu, f_, gg);
  return (d1 - d2) / (W * W);
}

// ---- developments of the cone of slope s (profile f' == s or -s) ----

// A cone end of slope s > 0 unrolls onto a plane sector of this angle at the
// apex; equivalently the circle at radius-coordinate f has circumference
// angle * slant_radius.
inline double cone_sector_angle(double s) { return 2.0 * pi * s / std::sqrt(1.0 + s * s); }

// Planar distance from the apex of the development to the circle of profile
// radius f.
inline double cone_slant(double f, double s) { return f * std::sqrt(1.0 + s * s) / s; }

// Shortest noncontractible loop through the point at slant rho: the chord of
// the development across the full sector (valid while the sector angle < pi).
inline double cone_loop_length(double rho, double sector_angle) {
  return 2.0 * rho * std::sin(0.5 * sector_angle);
}

// Length of the distance circle {d(., apex-axis) == const} through slant rho:
// arc of the development plus nothing, but as a curve on the cone the locus
// {d(., far end) == const} through rho is the involute chord pair of length
// 2 rho tan(theta/2).
inline double cone_equidistant_length(double rho, double sector_angle) {
  return 2.0 * rho * std::tan(0.5 * sector_angle);
}

// ---- catenoid (f = cosh v) closed forms ----

// Stable Riccati value at height v along the meridian, ray pointing up
// (dir=+1) or down (dir=-1).  The Jacobi solution that is asymptotically
// constant behind the ray is w = cosh(v) * (pi/2 + dir * gd(v)) with the
// Gudermannian gd(v) = asin(tanh v); U is its logarithmic derivative in
// arclength, dv/dt = dir / cosh(v).
inline double catenoid_meridian_U(double v, int dir) {
  const double tail = 0.5 * pi + dir * std::asin(std::tanh(v));
  return (1.0 + dir * std::sinh(v) * tail) / (std::cosh(v) * std::cosh(v) * tail);
}

// ---- total curvature of a revolution band [a, b] ----

// int K dA = -2 pi [f'/sqrt(1+f'^2)] evaluated between the end slopes.
inline double revolution_band_curvature(double fp_a, double fp_b) {
  return -2.0 * pi * (fp_b / std::sqrt(1.0 + fp_b * fp_b) - fp_a / std::sqrt(1.0 + fp_a * fp_a));
}

// ---- flat cylinder closed forms (circumference 2 pi r) ----

inline double flat_loop_length(double r) { return 2.0 * pi * r; }

inline double flat_distance(double r, double du_lift, double dv) {
  return std::hypot(r * du_lift, dv);
}

// ---- scalar Riccati closed forms u' + u^2 + K = 0 ----

// K == 0, u(0) = u0:  u(t) = u0 / (1 + u0 t).
inline double riccati_flat(double u0, double t) { return u0 / (1.0 + u0 * t); }

// K == -a^2, u(0) = a coth(a c):  u(t) = a coth(a (c + t)).
inline double riccati_hyperbolic(double a, double c, double t) {
  return a / std::tanh(a * (c + t));
}

}  // namespace oracle
