#include "cylab/riccati.hpp"

#include <cmath>

#include "cylab/errors.hpp"

namespace cylab {

double RiccatiSolution::eval(double t) const {
  if (blowup_ && t >= *blowup_ - 1e-12)
    throw GeometryError("riccati: evaluation at or beyond blow-up");
  const auto y = w_.eval(t);
  return y[1] / y[0];
}

RiccatiSolution riccati_solve(const std::function<double(double)>& curvature, double u0,
                              double t_max, const OdeOptions& opt) {
  auto rhs = [&curvature](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = -curvature(t) * y[0];
  };
  DenseOde<2> w = integrate<2>(rhs, {1.0, u0}, 0.0, t_max, opt);

  std::optional<double> blowup;
  const auto& ks = w.knots;
  for (std::size_t i = 1; i < ks.size() && !blowup; ++i) {
    if (ks[i - 1].y[0] > 0.0 && ks[i].y[0] <= 0.0) {
      double lo = ks[i - 1].t, hi = ks[i].t;
      for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (w.eval(mid)[0] > 0.0 ? lo : hi) = mid;
      }
      blowup = 0.5 * (lo + hi);
    }
  }
  return RiccatiSolution(std::move(w), blowup);
}

HopfResult hopf_stable_riccati(const CylinderMetric& m, CylinderPoint p, double psi,
                               const HopfOptions& opt) {
  // State along the reversed geodesic: (u, v, du, dv, w1, w1', w2, w2').
  using S = std::array<double, 8>;
  auto rhs = [&m](double, const S& y, S& dy) {
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
    dy[6] = y[7];
    dy[7] = -k * y[6];
  };
  auto renorm = [&m](double, S& y) {
    const double s = m.norm(y[0], y[1], y[2], y[3]);
    y[2] /= s;
    y[3] /= s;
    return true;
  };

  const auto d = m.direction(p.u, p.v, psi + kPi);
  S y{p.u, p.v, d[0], d[1], 1.0, 0.0, 0.0, 1.0};

  auto cap = [&m](double, const S& y) { return m.step_cap(y[1]); };

  HopfResult res;
  double t = 0.0;
  double t_next = 1.0;
  double u_prev = 0.0;
  bool have_prev = false;
  while (t_next <= opt.t_cap) {
    const DenseOde<8> seg = integrate<8>(rhs, y, t, t_next, opt.ode, renorm, cap);
    // Conjugate point <=> the Jacobi field w2 vanishing at the base vanishes
    // again; detected as a sign change past the start.
    for (std::size_t i = 1; i < seg.knots.size(); ++i) {
      const double a = seg.knots[i - 1].y[6], b = seg.knots[i].y[6];
      if (seg.knots[i].t > 1e-9 && a * b < 0.0)
        throw GeometryError("hopf: conjugate point along backward geodesic");
      if (seg.knots[i].t > 1e-9 && b == 0.0)
        throw GeometryError("hopf: conjugate point along backward geodesic");
    }
    y = seg.knots.back().y;
    t = t_next;

    const double u_now = y[4] / y[6];  // w1(T)/w2(T)
    res.value = u_now;
    res.t_used = t;
    if (have_prev) {
      res.last_delta = std::abs(u_now - u_prev);
      if (res.last_delta < opt.tol) {
        res.converged = true;
        return res;
      }
    }
    u_prev = u_now;
    have_prev = true;
    t_next *= 2.0;

    // Keep the Jacobi block in range; a joint positive scale preserves the
    // ratio read at segment boundaries.
    const double mag =
        std::max({std::abs(y[4]), std::abs(y[5]), std::abs(y[6]), std::abs(y[7])});
    if (mag > 1e100) {
      y[4] /= mag;
      y[5] /= mag;
      y[6] /= mag;
      y[7] /= mag;
    }
  }
  res.converged = false;
  return res;
}

}  // namespace cylab
