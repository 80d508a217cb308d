#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cylab/errors.hpp"

namespace cylab {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double h_init = 0.0;  // 0 = choose automatically
  double h_max = 0.0;   // 0 = full span
  std::size_t max_steps = 4000000;
};

// Tolerance presets.  `precise` backs single-shot API paths (distances,
// certificates); `field` backs bulk per-node assembly where the grid spacing
// dominates the error budget.
inline OdeOptions ode_precise() { return OdeOptions{1e-9, 1e-11, 0.0, 0.0, 4000000}; }
inline OdeOptions ode_field() { return OdeOptions{1e-6, 1e-8, 0.0, 0.0, 4000000}; }

template <std::size_t N>
struct OdeKnot {
  double t;
  std::array<double, N> y;
  std::array<double, N> dy;
};

// Accepted-step trajectory with cubic Hermite evaluation between knots.
template <std::size_t N>
class DenseOde {
 public:
  std::vector<OdeKnot<N>> knots;

  double t_begin() const { return knots.front().t; }
  double t_end() const { return knots.back().t; }

  std::array<double, N> eval(double t) const {
    const auto [a, b] = bracket(t);
    if (a == b) return a->y;
    const double h = b->t - a->t;
    const double s = (t - a->t) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = h00 * a->y[i] + h * h10 * a->dy[i] + h01 * b->y[i] + h * h11 * b->dy[i];
    return out;
  }

  double eval_component(double t, std::size_t i) const { return eval(t)[i]; }

 private:
  std::pair<const OdeKnot<N>*, const OdeKnot<N>*> bracket(double t) const {
    const auto& k = knots;
    if (t <= k.front().t) return {&k.front(), &k.front()};
    if (t >= k.back().t) return {&k.back(), &k.back()};
    // First knot with knot.t >= t.
    std::size_t lo = 0, hi = k.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (k[mid].t < t ? lo : hi) = mid;
    }
    return {&k[lo], &k[hi]};
  }
};

namespace ode_detail {
// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// 5th-minus-4th order error weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace ode_detail

// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0) and returns the dense
// trajectory.  `post_step` runs after each accepted step and may modify y
// in place (returning true), e.g. to renormalize a geodesic velocity; the
// stored derivative is then recomputed so Hermite interpolation stays
// consistent within later segments.  `step_cap` bounds the next attempted
// step from the current state (<= 0 means unbounded): a localized
// coefficient feature is invisible to the error estimate when a large step
// puts every stage point outside it, so trajectories must approach such
// regions with steps on the feature scale.
template <std::size_t N, class RHS, class PostStep, class StepCap>
DenseOde<N> integrate(RHS&& rhs, std::array<double, N> y0, double t0, double t1,
                      const OdeOptions& opt, PostStep&& post_step, StepCap&& step_cap) {
  using namespace ode_detail;
  if (!(t1 > t0)) throw ConfigError("integrate: need t1 > t0");
  const double span = t1 - t0;
  const double h_max = opt.h_max > 0.0 ? opt.h_max : span;

  DenseOde<N> out;
  out.knots.reserve(256);

  std::array<double, N> y = y0;
  std::array<double, N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
  double t = t0;
  rhs(t, y, k1);
  out.knots.push_back({t, y, k1});

  double h = opt.h_init > 0.0 ? opt.h_init : std::min(h_max, 1e-2 * span);
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    const double rem = t1 - t;
    if (rem <= 1e-12 * span) {
      // Snap a roundoff sliver onto the requested endpoint.
      out.knots.back().t = t1;
      return out;
    }
    h = std::min({h, h_max, rem});
    if (const double cap = step_cap(t, y); cap > 0.0) h = std::min(h, cap);
    if (h < 1e-14 * span) throw ConvergenceError("integrate: step size underflow");

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = yerr[i] / scale;
      err += r * r;
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      t += h;
      y = ynew;
      std::array<double, N> dy = k7;
      if (post_step(t, y)) rhs(t, y, dy);
      out.knots.push_back({t, y, dy});
      k1 = dy;  // FSAL (exact when post_step left y unchanged)
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= grow;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }
  throw ConvergenceError("integrate: max step count exceeded");
}

template <std::size_t N, class RHS, class PostStep>
DenseOde<N> integrate(RHS&& rhs, std::array<double, N> y0, double t0, double t1,
                      const OdeOptions& opt, PostStep&& post_step) {
  return integrate<N>(std::forward<RHS>(rhs), y0, t0, t1, opt,
                      std::forward<PostStep>(post_step),
                      [](double, const std::array<double, N>&) { return 0.0; });
}

template <std::size_t N, class RHS>
DenseOde<N> integrate(RHS&& rhs, const std::array<double, N>& y0, double t0, double t1,
                      const OdeOptions& opt) {
  return integrate<N>(std::forward<RHS>(rhs), y0, t0, t1, opt,
                      [](double, std::array<double, N>&) { return false; });
}

}  // namespace cylab
