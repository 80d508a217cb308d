#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cylab/errors.hpp"
#include "cylab/geodesic.hpp"
#include "cylab/metric.hpp"
#include "cylab/riccati.hpp"
#include "oracles.hpp"

using namespace cylab;

TEST_CASE("riccati closed forms") {
  auto zero = [](double) { return 0.0; };
  const RiccatiSolution flat = riccati_solve(zero, 1.0, 20.0);
  for (double t : {0.1, 1.0, 5.0, 19.0})
    CHECK(flat.eval(t) == doctest::Approx(oracle::riccati_flat(1.0, t)).epsilon(1e-9));
  CHECK(!flat.blowup_time().has_value());

  // Constant solution u == a for K == -a^2.
  auto khyp = [](double) { return -0.49; };
  const RiccatiSolution hyp = riccati_solve(khyp, 0.7, 30.0);
  for (double t : {1.0, 10.0, 29.0})
    CHECK(hyp.eval(t) == doctest::Approx(0.7).epsilon(1e-9));

  // Generic hyperbolic solution a coth(a (c + t)).
  const double a = 1.3, c = 0.6;
  auto k2 = [a](double) { return -a * a; };
  const RiccatiSolution gen = riccati_solve(k2, oracle::riccati_hyperbolic(a, c, 0.0), 8.0);
  for (double t : {0.5, 2.0, 7.5})
    CHECK(gen.eval(t) == doctest::Approx(oracle::riccati_hyperbolic(a, c, t)).epsilon(1e-8));
}

TEST_CASE("riccati blow-up detection") {
  auto zero = [](double) { return 0.0; };
  const RiccatiSolution s = riccati_solve(zero, -1.0, 3.0);
  REQUIRE(s.blowup_time().has_value());
  CHECK(*s.blowup_time() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.eval(0.5) == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK_THROWS_AS(s.eval(1.5), GeometryError);

  auto one = [](double) { return 1.0; };
  const RiccatiSolution tan_branch = riccati_solve(one, 0.0, 3.0);
  REQUIRE(tan_branch.blowup_time().has_value());
  CHECK(*tan_branch.blowup_time() == doctest::Approx(kPi / 2).epsilon(1e-10));
}

TEST_CASE("riccati residual by finite differences of the samples") {
  // Independent of the substitution used internally: sample u, difference it.
  auto K = [](double t) { return 0.3 * std::sin(t) - 0.1; };
  const RiccatiSolution s = riccati_solve(K, 0.4, 12.0);
  const double h = 1e-5;
  for (double t = 0.5; t < 12.0; t += 0.7) {
    const double du = (s.eval(t + h) - s.eval(t - h)) / (2 * h);
    const double u = s.eval(t);
    CHECK(std::abs(du + u * u + K(t)) < 1e-5);
  }
}

TEST_CASE("hopf limit on the flat cylinder is zero") {
  auto m = make_flat(1.0);
  const HopfResult r = hopf_stable_riccati(*m, make_point(0.3, 0.0), 0.37);
  CHECK(r.converged);
  CHECK(std::abs(r.value) < 5e-7);
  CHECK(r.t_used >= 1e6);
}

TEST_CASE("hopf limit under constant negative curvature") {
  const double a = 0.8;
  auto m = make_constant_negative(a);
  for (double psi : {0.0, 0.9, kPi / 2, 2.5}) {
    const HopfResult r = hopf_stable_riccati(*m, make_point(0.2, -0.4), psi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(a).epsilon(1e-6));
    CHECK(r.t_used < 100.0);
  }
}

TEST_CASE("hopf value is invariant under the geodesic flow") {
  // Transporting U along its own geodesic by the Riccati equation must give
  // the hopf value at the transported vector.
  auto m = make_catenoid();
  const CylinderPoint p = make_point(0.8, 0.3);
  const double psi = 0.7, s = 1.5;
  const HopfResult at_start = hopf_stable_riccati(*m, p, psi);
  REQUIRE(at_start.converged);

  const Geodesic g = shoot(m, p, psi, s);
  auto K = [&](double t) {
    const auto y = g.state(t);
    return m->gauss_curvature(y[0], y[1]);
  };
  const RiccatiSolution transported = riccati_solve(K, at_start.value, s);

  const auto ye = g.state(s);
  const double psi_end = m->angle_of(ye[0], ye[1], ye[2], ye[3]);
  const HopfResult at_end =
      hopf_stable_riccati(*m, make_point(ye[0], ye[1]), psi_end);
  REQUIRE(at_end.converged);
  CHECK(at_end.value == doctest::Approx(transported.eval(s)).epsilon(2e-6));
}

TEST_CASE("hopf comparison bound from the curvature range") {
  SmoothedConeParams prm;
  prm.slope_in = 0.12;
  prm.slope_out = 0.12;
  auto cone = make_smoothed_cone(prm);
  auto cat = make_catenoid();
  for (const MetricPtr& m : {cone, cat}) {
    for (double psi : {0.1, 1.2, 2.8, 4.0}) {
      const CylinderPoint p = make_point(0.5, 0.4);
      const HopfResult r = hopf_stable_riccati(*m, p, psi);
      CHECK(r.converged);
      // A = sup sqrt(-K) over the backward unit segment bounds |U| by
      // A coth(A), degenerating to 1 as A -> 0.
      const Geodesic back = shoot(m, p, psi + kPi, 1.0);
      double k_min = 0.0;
      for (double t = 0.0; t <= 1.0; t += 0.02)
        k_min = std::min(k_min, m->gauss_curvature(back.u_lift(t), back.v(t)));
      const double A = std::sqrt(-k_min);
      const double bound = A < 1e-8 ? 1.0 : A / std::tanh(A);
      CHECK(std::abs(r.value) <= bound + 1e-6);
      // Nonpositive curvature keeps the stable solution nonnegative.
      CHECK(r.value >= -1e-6);
    }
  }
}

TEST_CASE("hopf refuses metrics with conjugate points") {
  auto sphere = std::make_shared<ExplicitMetric>(
      "sphere_patch",
      [](double, double v) -> FirstForm {
        const double c = std::cos(v);
        return {c * c, 0.0, 1.0};
      },
      nullptr, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(hopf_stable_riccati(*sphere, make_point(0.0, 0.0), 0.0), GeometryError);
}
