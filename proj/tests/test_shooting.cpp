#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cylab/errors.hpp"
#include "cylab/metric.hpp"
#include "cylab/shooting.hpp"
#include "oracles.hpp"

using namespace cylab;

namespace {

SmoothedConeParams cone_sym(double s) {
  SmoothedConeParams p;
  p.slope_in = p.slope_out = s;
  p.bridge_lo = -1.0;
  p.bridge_hi = 1.0;
  return p;
}

}  // namespace

TEST_CASE("flat cover connections are chart chords") {
  const double r = 1.4;
  auto m = make_flat(r);
  const CylinderPoint p = make_point(0.7, -1.0);
  for (double du : {0.4, -2.0, 7.0}) {
    for (double dv : {0.0, 1.7, -4.0}) {
      if (du == 0.4 && dv == 0.0) continue;
      const ConnectResult c = connect_in_cover(m, p, {p.u + du, p.v + dv});
      CHECK(c.length == doctest::Approx(oracle::flat_distance(r, du, dv)).epsilon(1e-9));
      // Independent replay of the reported data.
      const Geodesic replay = shoot(m, p, c.psi, c.length);
      CHECK(replay.u_lift(c.length) == doctest::Approx(p.u + du).epsilon(1e-8));
      CHECK(std::abs(replay.v(c.length) - (p.v + dv)) < 1e-8);
    }
  }
}

TEST_CASE("flat cylinder distance picks the nearest lift") {
  const double r = 0.8;
  auto m = make_flat(r);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-8.0, 8.0);
  for (int i = 0; i < 20; ++i) {
    const CylinderPoint p = make_point(U(rng), 0.3 * U(rng));
    const CylinderPoint q = make_point(U(rng), 0.3 * U(rng));
    const double du0 = nearest_du(p.u, q.u);
    const DistanceResult d = cylinder_distance(m, p, q);
    CHECK(d.distance ==
          doctest::Approx(oracle::flat_distance(r, du0, q.v - p.v)).epsilon(1e-9));
    CHECK(d.deck == 0);
  }
}

TEST_CASE("cone distances match the development chord") {
  // Far out on a cone end both the connecting geodesic and its development
  // stay in the exactly conical region, so the planar chord is exact.
  const double s = 0.12;
  auto m = make_smoothed_cone(cone_sym(s));
  const auto* rev = dynamic_cast<const RevolutionMetric*>(m.get());
  const double theta = oracle::cone_sector_angle(s);

  const double v1 = 25.0, v2 = 35.0, du = 1.0;
  const double rho1 = oracle::cone_slant(rev->profile().f(v1), s);
  const double rho2 = oracle::cone_slant(rev->profile().f(v2), s);
  const double dphi = du * theta / kTwoPi;
  const double chord =
      std::sqrt(rho1 * rho1 + rho2 * rho2 - 2 * rho1 * rho2 * std::cos(dphi));

  const DistanceResult d =
      cylinder_distance(m, make_point(0.3, v1), make_point(0.3 + du, v2));
  CHECK(d.distance == doctest::Approx(chord).epsilon(1e-8));
  CHECK(d.deck == 0);
}

TEST_CASE("distance symmetry and triangle inequality") {
  auto m = make_catenoid();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 8; ++i) {
    const CylinderPoint a = make_point(U(rng), U(rng));
    const CylinderPoint b = make_point(U(rng), U(rng));
    const CylinderPoint c = make_point(U(rng), U(rng));
    const double ab = cylinder_distance(m, a, b).distance;
    const double ba = cylinder_distance(m, b, a).distance;
    const double bc = cylinder_distance(m, b, c).distance;
    const double ac = cylinder_distance(m, a, c).distance;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-8));
    CHECK(ac <= ab + bc + 1e-8);
  }
}

TEST_CASE("short distances agree with the chart metric") {
  auto m = make_catenoid();
  const CylinderPoint p = make_point(1.1, 0.4);
  const double du = 6e-3, dv = -8e-3;
  // Midpoint chord is second-order accurate; the endpoint chord is not.
  const double chord = m->norm(p.u + du / 2, p.v + dv / 2, du, dv);
  const DistanceResult d = cylinder_distance(m, p, make_point(p.u + du, p.v + dv));
  CHECK(d.distance == doctest::Approx(chord).epsilon(1e-5));
}

TEST_CASE("flat shortest loop is the circle") {
  const double r = 1.3;
  auto m = make_flat(r);
  const LoopResult l = shortest_loop(m, make_point(0.2, 5.0));
  CHECK(l.length == doctest::Approx(oracle::flat_loop_length(r)).epsilon(1e-10));
  CHECK(l.winding == 1);
  CHECK(l.simple);
}

TEST_CASE("cone shortest loop through a far point is the development chord") {
  const double s = 0.12;
  auto m = make_smoothed_cone(cone_sym(s));
  const auto* rev = dynamic_cast<const RevolutionMetric*>(m.get());
  const double theta = oracle::cone_sector_angle(s);
  const double v0 = 30.0;
  const double rho = oracle::cone_slant(rev->profile().f(v0), s);
  // The chord dips to slant rho cos(theta/2), still conical, so the oracle
  // is exact.
  const LoopResult l = shortest_loop(m, make_point(1.0, v0));
  CHECK(l.length == doctest::Approx(oracle::cone_loop_length(rho, theta)).epsilon(1e-8));
  CHECK(std::abs(l.winding) == 1);
  CHECK(l.simple);
  // And it is shorter than the parallel circle through the same point.
  CHECK(l.length < kTwoPi * rev->profile().f(v0));
}

TEST_CASE("loops on the waist circle close up exactly") {
  auto m = make_smoothed_cone(cone_sym(0.12));
  const LoopResult l = shortest_loop(m, make_point(0.0, 0.0));
  CHECK(l.length == doctest::Approx(kTwoPi).epsilon(1e-9));
  CHECK(l.simple);
}

TEST_CASE("warm starts cut the iteration count") {
  auto m = make_smoothed_cone(cone_sym(0.12));
  const CylinderPoint base = make_point(0.0, -6.0);
  ConnectOptions opt;
  int cold_iters = 0;
  std::pair<double, double> carry;
  for (int j = 0; j <= 24; ++j) {
    const double u = j * (kTwoPi / 256.0);
    ConnectOptions o = opt;
    if (j > 0) o.guess = carry;
    const ConnectResult c = connect_in_cover(m, base, {base.u + u, 9.0}, o);
    carry = {c.psi, c.length};
    if (j == 0)
      cold_iters = c.iters;
    else
      CHECK(c.iters <= 4);
  }
  CHECK(cold_iters <= 12);
}

TEST_CASE("coincident endpoints are rejected") {
  auto m = make_flat(1.0);
  CHECK_THROWS_AS(connect_in_cover(m, make_point(0.1, 0.2), {0.1, 0.2}), ConfigError);
}

TEST_CASE("self-intersection sweep flags a figure-eight-like path") {
  // A long geodesic wrapping with drift on the catenoid crosses itself once
  // it passes the waist obliquely; the sweep must notice crossings and stay
  // quiet on short arcs.
  auto m = make_catenoid();
  const Geodesic arc = shoot(m, make_point(0.0, -2.0), 0.3, 3.0);
  CHECK(!geodesic_self_intersects(arc));
}
