#include "cylab/geodesic.hpp"

#include <cmath>

#include "cylab/errors.hpp"

namespace cylab {

namespace {

Geodesic shoot_state(const MetricPtr& m, const GeodesicState& y0, double length,
                     const OdeOptions& opt) {
  if (!(length > 0.0)) throw ConfigError("geodesic: length must be positive");
  const CylinderMetric& g = *m;
  double drift = 0.0;
  auto rhs = [&g](double, const GeodesicState& y, GeodesicState& dy) { geodesic_rhs(g, y, dy); };
  auto renorm = [&g, &drift](double, GeodesicState& y) {
    const double s = g.norm(y[0], y[1], y[2], y[3]);
    drift = std::max(drift, std::abs(s - 1.0));
    y[2] /= s;
    y[3] /= s;
    return true;
  };
  auto cap = [&g](double, const GeodesicState& y) { return g.step_cap(y[1]); };
  DenseOde<4> traj = integrate<4>(rhs, y0, 0.0, length, opt, renorm, cap);
  return Geodesic(m, std::move(traj), drift);
}

}  // namespace

Geodesic shoot(const MetricPtr& m, CylinderPoint p, double psi, double length,
               const OdeOptions& opt) {
  const auto d = m->direction(p.u, p.v, psi);
  return shoot_state(m, {p.u, p.v, d[0], d[1]}, length, opt);
}

Geodesic shoot_vector(const MetricPtr& m, const TangentVector& x, double length,
                      const OdeOptions& opt) {
  const double s = m->norm(x.base.u, x.base.v, x.du, x.dv);
  if (!(s > 0.0)) throw ConfigError("geodesic: zero initial velocity");
  return shoot_state(m, {x.base.u, x.base.v, x.du / s, x.dv / s}, length, opt);
}

DenseOde<6> shoot_with_jacobi(const CylinderMetric& m, CylinderPoint p, double psi, double length,
                              double w0, double dw0, const OdeOptions& opt) {
  if (!(length > 0.0)) throw ConfigError("geodesic: length must be positive");
  auto rhs = [&m](double, const JacobiState& y, JacobiState& dy) {
    Christoffels c;
    double k;
    m.geodesic_data(y[0], y[1], c, k);
    const double du = y[2], dv = y[3];
    dy[0] = du;
    dy[1] = dv;
    dy[2] = -(c.uuu * du * du + 2.0 * c.uuv * du * dv + c.uvv * dv * dv);
    dy[3] = -(c.vuu * du * du + 2.0 * c.vuv * du * dv + c.vvv * dv * dv);
    dy[4] = y[5];
    dy[5] = -k * y[4];
  };
  auto renorm = [&m](double, JacobiState& y) {
    const double s = m.norm(y[0], y[1], y[2], y[3]);
    y[2] /= s;
    y[3] /= s;
    return true;
  };
  const auto d = m.direction(p.u, p.v, psi);
  auto cap = [&m](double, const JacobiState& y) { return m.step_cap(y[1]); };
  return integrate<6>(rhs, {p.u, p.v, d[0], d[1], w0, dw0}, 0.0, length, opt, renorm, cap);
}

std::optional<double> first_jacobi_zero(const DenseOde<6>& traj, double t_eps) {
  const auto& ks = traj.knots;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (ks[i - 1].t < t_eps && ks[i].t <= t_eps) continue;
    const double w0 = ks[i - 1].y[4], w1 = ks[i].y[4];
    if (w0 == 0.0 && ks[i - 1].t > t_eps) return ks[i - 1].t;
    if (w0 * w1 < 0.0) {
      double lo = std::max(ks[i - 1].t, t_eps), hi = ks[i].t;
      double flo = traj.eval(lo)[4];
      for (int it = 0; it < 100 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = traj.eval(mid)[4];
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::nullopt;
}

}  // namespace cylab
