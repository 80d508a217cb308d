#pragma once

#include <array>
#include <optional>

#include "cylab/metric.hpp"
#include "cylab/ode.hpp"

namespace cylab {

// Chart state of a geodesic: (u, v, du, dv) with u unwrapped (lifted to R).
using GeodesicState = std::array<double, 4>;

// Right-hand side of the geodesic equation in the (u, v) chart.
inline void geodesic_rhs(const CylinderMetric& m, const GeodesicState& y, GeodesicState& dy) {
  const Christoffels c = m.christoffels(y[0], y[1]);
  const double du = y[2], dv = y[3];
  dy[0] = du;
  dy[1] = dv;
  dy[2] = -(c.uuu * du * du + 2.0 * c.uuv * du * dv + c.uvv * dv * dv);
  dy[3] = -(c.vuu * du * du + 2.0 * c.vuv * du * dv + c.vvv * dv * dv);
}

// Unit-speed geodesic over a fixed arc-length interval [0, L].  The chart
// lift is continuous: u is NOT wrapped, so winding around the cylinder is
// visible as u advancing by multiples of 2*pi.
class Geodesic {
 public:
  Geodesic(MetricPtr metric, DenseOde<4> trajectory, double speed_drift)
      : metric_(std::move(metric)), traj_(std::move(trajectory)), drift_(speed_drift) {}

  double length() const { return traj_.t_end(); }
  GeodesicState state(double t) const { return traj_.eval(t); }
  double u_lift(double t) const { return traj_.eval(t)[0]; }
  double v(double t) const { return traj_.eval(t)[1]; }
  CylinderPoint point(double t) const {
    const auto y = traj_.eval(t);
    return make_point(y[0], y[1]);
  }
  TangentVector velocity(double t) const {
    const auto y = traj_.eval(t);
    return {make_point(y[0], y[1]), y[2], y[3]};
  }

  // Max deviation of the integrated speed from 1 observed at accepted steps,
  // before renormalization.  Stays ~1e-9 on the precise preset.
  double speed_drift() const { return drift_; }

  const DenseOde<4>& dense() const { return traj_; }
  const MetricPtr& metric() const { return metric_; }

 private:
  MetricPtr metric_;
  DenseOde<4> traj_;
  double drift_;
};

// Geodesic from p in the direction at angle psi (measured from the
// normalized d/du toward its 90-degree rotation), unit speed, length L.
Geodesic shoot(const MetricPtr& m, CylinderPoint p, double psi, double length,
               const OdeOptions& opt = ode_precise());

// Geodesic with initial velocity X normalized to unit length.
Geodesic shoot_vector(const MetricPtr& m, const TangentVector& x, double length,
                      const OdeOptions& opt = ode_precise());

// Joint integration of the geodesic and a scalar Jacobi field
// w'' + K(gamma(t)) w = 0; state (u, v, du, dv, w, w').
using JacobiState = std::array<double, 6>;
DenseOde<6> shoot_with_jacobi(const CylinderMetric& m, CylinderPoint p, double psi, double length,
                              double w0, double dw0, const OdeOptions& opt = ode_precise());

// First zero of w = y[4] in (t_eps, L], located by bisection on the dense
// trajectory; nullopt when w has no sign change there.
std::optional<double> first_jacobi_zero(const DenseOde<6>& traj, double t_eps = 1e-9);

}  // namespace cylab
