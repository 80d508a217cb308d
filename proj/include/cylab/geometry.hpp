#pragma once

#include <cmath>

namespace cylab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Canonical representative of an angle in [0, 2*pi).
inline double wrap_angle(double u) {
  double w = std::fmod(u, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can return exactly kTwoPi after the correction when u is a tiny
  // negative number; fold that back.
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

// Signed angular displacement from u_from to u_to along the shorter arc,
// in (-pi, pi].
inline double nearest_du(double u_from, double u_to) {
  double d = wrap_angle(u_to - u_from);
  return (d > kPi) ? d - kTwoPi : d;
}

// Point on the cylinder S^1 x R; u is stored wrapped to [0, 2*pi).
struct CylinderPoint {
  double u = 0.0;
  double v = 0.0;
};

inline CylinderPoint make_point(double u, double v) {
  return {wrap_angle(u), v};
}

// Tangent vector attached to a point, components in the (u, v) chart.
struct TangentVector {
  CylinderPoint base;
  double du = 0.0;
  double dv = 0.0;
};

}  // namespace cylab
