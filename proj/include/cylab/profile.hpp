#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace cylab {

// Generating curve v -> f(v) > 0 of a surface of revolution with unit-speed
// axis coordinate v.  Outside [support_lo, support_hi] the profile is affine
// (f'' == 0), so the ends are exact cones (or flat, when the slope is zero);
// slope_lo/slope_hi are the constant values of f' there.
struct Profile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> ddf;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  // Length scale of coefficient variation inside the support; integration
  // steps near the support must stay below it or an adaptive stepper can
  // jump the whole feature with every stage point outside (zero estimated
  // error).  That trap needs an exactly affine stretch, where the right-hand
  // side vanishes identically and the controller grows steps without bound;
  // profiles with no such stretch (or no feature at all) leave this 0 and
  // stay uncapped.
  double feature_scale = 0.0;
  std::string name;
};

// f == r.
Profile constant_profile(double r);

// f == cosh(v); conformal metric cosh^2(v) (du^2 + dv^2).
Profile catenoid_profile();

// Two cone ends f' == -slope_in (v < bridge_lo) and f' == +slope_out
// (v > bridge_hi) joined by the C^2 bridge whose second derivative is the
// quartic bump 6 (s_in + s_out) x (1-x) / h, x = (v - bridge_lo) / h.
// The profile is convex, its minimum (waist) lies in the bridge and is
// normalized to waist_value.
struct SmoothedConeParams {
  double slope_in = 0.0;
  double slope_out = 0.0;
  double bridge_lo = -1.0;
  double bridge_hi = 1.0;
  double waist_value = 1.0;
};
Profile smoothed_cone_profile(const SmoothedConeParams& p);

// Natural cubic spline through (v_i, f_i), extended affinely with the end
// slopes, so custom profiles also have conical ends.  Requires strictly
// increasing v_i, positive f_i, and end slopes pointing outward
// (left slope <= 0 <= right slope) so f stays positive on all of R.
Profile spline_profile(const std::vector<double>& v, const std::vector<double>& f);

}  // namespace cylab
