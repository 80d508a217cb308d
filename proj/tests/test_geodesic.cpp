#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cylab/geodesic.hpp"
#include "cylab/metric.hpp"
#include "oracles.hpp"

using namespace cylab;

namespace {

SmoothedConeParams cone_ab() {
  SmoothedConeParams p;
  p.slope_in = 0.15;
  p.slope_out = 0.08;
  p.bridge_lo = -1.5;
  p.bridge_hi = 1.0;
  return p;
}

}  // namespace

TEST_CASE("flat geodesics are chart lines") {
  const double r = 1.5;
  auto m = make_flat(r);
  const double psi = 0.6, L = 12.0;
  const Geodesic g = shoot(m, make_point(0.5, -1.0), psi, L);
  for (double t : {1.0, 4.7, 9.3, L}) {
    CHECK(g.u_lift(t) == doctest::Approx(0.5 + t * std::cos(psi) / r).epsilon(1e-9));
    CHECK(g.v(t) == doctest::Approx(-1.0 + t * std::sin(psi)).epsilon(1e-9));
  }
  CHECK(g.speed_drift() < 1e-8);
}

TEST_CASE("clairaut invariant is conserved") {
  for (const MetricPtr& m : {make_smoothed_cone(cone_ab()), make_catenoid()}) {
    const auto* rev = dynamic_cast<const RevolutionMetric*>(m.get());
    REQUIRE(rev != nullptr);
    const Geodesic g = shoot(m, make_point(1.0, 2.0), 0.8, 50.0);
    const auto y0 = g.state(0.0);
    const double c0 = rev->form(y0[0], y0[1]).E * y0[2];
    for (double t = 0.0; t <= 50.0; t += 2.5) {
      const auto y = g.state(t);
      const double c = rev->form(y[0], y[1]).E * y[2];
      // Interior samples go through Hermite interpolation, which costs an
      // extra digit over the knot accuracy on wide smooth-region steps.
      CHECK(c == doctest::Approx(c0).epsilon(3e-6));
    }
    CHECK(g.speed_drift() < 1e-8);
  }
}

TEST_CASE("meridians stay meridians and measure arc length") {
  auto m = make_smoothed_cone(cone_ab());
  const auto* rev = dynamic_cast<const RevolutionMetric*>(m.get());
  const Geodesic g = shoot(m, make_point(2.0, -3.0), kPi / 2, 8.0);
  CHECK(std::abs(g.u_lift(8.0) - 2.0) < 1e-9);
  // v(t) inverts the meridian arc length integral of sqrt(G).
  const double v_end = g.v(8.0);
  const int n = 2000;
  double arc = 0.0;
  const double h = (v_end + 3.0) / n;
  for (int i = 0; i <= n; ++i) {
    const double v = -3.0 + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double df = rev->profile().df(v);
    arc += w * std::sqrt(1.0 + df * df);
  }
  arc *= h / 3.0;
  CHECK(arc == doctest::Approx(8.0).epsilon(1e-7));
}

TEST_CASE("waist circle is a closed geodesic") {
  SmoothedConeParams sym;
  sym.slope_in = sym.slope_out = 0.12;
  sym.bridge_lo = -1.0;
  sym.bridge_hi = 1.0;
  auto m = make_smoothed_cone(sym);  // waist at v = 0, f = 1
  const Geodesic g = shoot(m, make_point(0.25, 0.0), 0.0, kTwoPi);
  CHECK(g.u_lift(kTwoPi) == doctest::Approx(0.25 + kTwoPi).epsilon(1e-9));
  CHECK(std::abs(g.v(kTwoPi)) < 1e-8);

  // Catenoid waist, radius 1 as well.
  const Geodesic gc = shoot(make_catenoid(), make_point(1.0, 0.0), 0.0, kTwoPi);
  CHECK(gc.u_lift(kTwoPi) == doctest::Approx(1.0 + kTwoPi).epsilon(1e-8));
  CHECK(std::abs(gc.v(kTwoPi)) < 1e-7);
}

TEST_CASE("reversing a geodesic returns to the start") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const MetricPtr& m : {make_catenoid(), make_smoothed_cone(cone_ab()), make_flat(1.0)}) {
    for (int i = 0; i < 5; ++i) {
      const CylinderPoint p = make_point(3.0 * U(rng), 1.5 * U(rng));
      const double psi = kPi * U(rng), L = 7.0;
      const Geodesic g = shoot(m, p, psi, L);
      const auto ye = g.state(L);
      const Geodesic back =
          shoot_vector(m, {make_point(ye[0], ye[1]), -ye[2], -ye[3]}, L);
      CHECK(std::abs(nearest_du(back.point(L).u, p.u)) < 1e-6);
      CHECK(std::abs(back.v(L) - p.v) < 1e-6);
    }
  }
}

TEST_CASE("jacobi fields: flat and constant negative curvature closed forms") {
  {
    const auto traj = shoot_with_jacobi(*make_flat(1.0), make_point(0.0, 0.0), 0.3, 10.0, 0.0, 1.0);
    for (double t : {0.5, 3.3, 10.0})
      CHECK(traj.eval(t)[4] == doctest::Approx(t).epsilon(1e-9));
  }
  {
    const double a = 0.7;
    const auto traj =
        shoot_with_jacobi(*make_constant_negative(a), make_point(0.0, 0.0), 1.1, 6.0, 0.0, 1.0);
    for (double t : {0.5, 2.0, 6.0})
      CHECK(traj.eval(t)[4] == doctest::Approx(std::sinh(a * t) / a).epsilon(1e-8));
    CHECK(!first_jacobi_zero(traj).has_value());
  }
}

TEST_CASE("conjugate point on the sphere patch at distance pi") {
  auto sphere = std::make_shared<ExplicitMetric>(
      "sphere_patch",
      [](double, double v) -> FirstForm {
        const double c = std::cos(v);
        return {c * c, 0.0, 1.0};
      },
      nullptr, [](double, double) { return 1.0; });
  // Run along the equator; w = sin(t) vanishes first at pi.
  const auto traj = shoot_with_jacobi(*sphere, make_point(0.0, 0.0), 0.0, 4.0, 0.0, 1.0);
  const auto z = first_jacobi_zero(traj);
  REQUIRE(z.has_value());
  CHECK(*z == doctest::Approx(kPi).epsilon(1e-8));
}

TEST_CASE("geodesic deviation matches the jacobi field to first order") {
  auto m = make_catenoid();
  const CylinderPoint p = make_point(0.7, -0.4);
  const double psi = 0.9, L = 5.0, dpsi = 1e-5;
  const auto traj = shoot_with_jacobi(*m, p, psi, L, 0.0, 1.0);
  const Geodesic g1 = shoot(m, p, psi, L);
  const Geodesic g2 = shoot(m, p, psi + dpsi, L);
  for (double t : {1.0, 2.5, 5.0}) {
    const auto y = traj.eval(t);
    const auto n = m->rotate90(y[0], y[1], y[2], y[3]);
    const double w = y[4];
    // Chart difference of the perturbed geodesic vs w * normal * dpsi.
    CHECK(g2.u_lift(t) - g1.u_lift(t) == doctest::Approx(w * n[0] * dpsi).epsilon(2e-3));
    CHECK(g2.v(t) - g1.v(t) == doctest::Approx(w * n[1] * dpsi).epsilon(2e-3));
  }
}
