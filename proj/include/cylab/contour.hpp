#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cylab/metric.hpp"

namespace cylab {

// Scalar samples on a u-periodic grid: nu columns at u_i = 2*pi*i/nu (no
// duplicated seam column) and nv rows spanning [v_min, v_max].
class ScalarField {
 public:
  ScalarField(int nu, int nv, double v_min, double v_max);

  int nu() const { return nu_; }
  int nv() const { return nv_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  double du() const { return kTwoPi / nu_; }
  double dv() const { return (v_max_ - v_min_) / (nv_ - 1); }
  double u_of(int i) const { return kTwoPi * i / nu_; }
  double v_of(int j) const { return v_min_ + dv() * j; }

  double& at(int i, int j) { return data_[static_cast<std::size_t>(j) * nu_ + i]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(j) * nu_ + i]; }

  // Bilinear interpolation; u wraps, v must stay inside the window.
  double eval(double u, double v) const;

 private:
  int nu_, nv_;
  double v_min_, v_max_;
  std::vector<double> data_;
};

// One closed level component drawn on the cylinder: consecutive chart points
// with continuous u-lift; closure returns to the start shifted by
// winding * 2*pi in u.
struct LevelCurve {
  std::vector<std::array<double, 2>> pts;  // (u_lift, v)
  int winding = 0;
};

struct ContourOptions {
  // With a continuous field callable, crossing points are sharpened along
  // their grid edge by bisection until |f - level| <= refine_tol (or the
  // depth cap).
  std::function<double(double, double)> continuous;
  double refine_tol = 1e-10;
  int refine_depth = 20;
};

// All closed components of {field == level} by marching squares (u-periodic,
// saddle cells split by the center average).  A component reaching the top or
// bottom row of the window is not closed on the cylinder: GeometryError.
std::vector<LevelCurve> extract_level_curves(const ScalarField& field, double level,
                                             const ContourOptions& opt = {});

// Length of the polyline on the surface; 3-point Gauss-Legendre per segment.
double polyline_length(const CylinderMetric& m, const LevelCurve& curve);

// Integral of a pointwise weight over the polyline against arc length.
double polyline_integral(const CylinderMetric& m, const LevelCurve& curve,
                         const std::function<double(double, double)>& weight);

}  // namespace cylab
