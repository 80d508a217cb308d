#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cylab/contour.hpp"
#include "cylab/errors.hpp"
#include "cylab/metric.hpp"

using namespace cylab;

namespace {

ScalarField sample(int nu, int nv, double v_min, double v_max,
                   const std::function<double(double, double)>& f) {
  ScalarField field(nu, nv, v_min, v_max);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) field.at(i, j) = f(field.u_of(i), field.v_of(j));
  return field;
}

}  // namespace

TEST_CASE("bilinear evaluation reproduces node values and wraps in u") {
  auto f = [](double u, double v) { return std::sin(u) + v; };
  const ScalarField field = sample(64, 33, -2.0, 2.0, f);
  CHECK(field.eval(field.u_of(5), field.v_of(7)) ==
        doctest::Approx(f(field.u_of(5), field.v_of(7))));
  CHECK(field.eval(-0.01, 0.5) == doctest::Approx(field.eval(kTwoPi - 0.01, 0.5)));
  CHECK(field.eval(0.13, 0.4) == doctest::Approx(f(0.13, 0.4)).epsilon(1e-2));
  CHECK_THROWS_AS(field.eval(1.0, 2.5), GeometryError);
}

TEST_CASE("horizontal level curves of the height field") {
  SmoothedConeParams prm;
  prm.slope_in = prm.slope_out = 0.12;
  prm.bridge_lo = -1.0;
  prm.bridge_hi = 1.0;
  auto m = make_smoothed_cone(prm);
  const auto* rev = dynamic_cast<const RevolutionMetric*>(m.get());

  const ScalarField field = sample(128, 65, -3.0, 3.0, [](double, double v) { return v; });
  const double level = 0.73;  // off the grid rows
  const auto curves = extract_level_curves(field, level);
  REQUIRE(curves.size() == 1);
  CHECK(std::abs(curves[0].winding) == 1);
  // The parallel at height v has length 2 pi f(v); the polyline is exact here
  // because the curve is a straight grid line.
  CHECK(polyline_length(*m, curves[0]) ==
        doctest::Approx(kTwoPi * rev->profile().f(level)).epsilon(1e-9));
}

TEST_CASE("sinusoidal graph curve: winding and length against fine quadrature") {
  auto m = make_flat(1.0);
  auto f = [](double u, double v) { return v - 0.2 * std::sin(u); };
  const ScalarField field = sample(256, 129, -1.0, 1.0, f);
  const auto curves = extract_level_curves(field, 0.0);
  REQUIRE(curves.size() == 1);
  CHECK(std::abs(curves[0].winding) == 1);

  double exact = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = kTwoPi * i / n;
    exact += std::hypot(1.0, 0.2 * std::cos(u)) * (kTwoPi / n);
  }
  CHECK(polyline_length(*m, curves[0]) == doctest::Approx(exact).epsilon(5e-4));
}

TEST_CASE("two components on opposite sides") {
  auto f = [](double, double v) { return v * v; };
  const ScalarField field = sample(64, 129, -2.0, 2.0, f);
  const auto curves = extract_level_curves(field, 1.21);
  REQUIRE(curves.size() == 2);
  CHECK(std::abs(curves[0].winding) == 1);
  CHECK(std::abs(curves[1].winding) == 1);
  const double v0 = std::min(curves[0].pts[0][1], curves[1].pts[0][1]);
  const double v1 = std::max(curves[0].pts[0][1], curves[1].pts[0][1]);
  // Linear interpolation of a quadratic field: O(h^2) placement error.
  CHECK(v0 == doctest::Approx(-1.1).epsilon(1e-3));
  CHECK(v1 == doctest::Approx(1.1).epsilon(1e-3));
}

TEST_CASE("contractible component has winding zero") {
  auto m = make_flat(1.0);
  auto f = [](double u, double v) {
    const double x = u - kPi;
    return x * x + v * v;
  };
  const ScalarField field = sample(256, 257, -2.0, 2.0, f);
  const auto curves = extract_level_curves(field, 0.25);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].winding == 0);
  CHECK(polyline_length(*m, curves[0]) == doctest::Approx(kPi).epsilon(1e-3));
}

TEST_CASE("curves leaving the window raise") {
  auto f = [](double u, double v) { return v - 3.0 * std::cos(u); };
  const ScalarField field = sample(128, 65, -2.0, 2.0, f);
  CHECK_THROWS_AS(extract_level_curves(field, 0.0), GeometryError);
}

TEST_CASE("bisection refinement sharpens crossings to the continuous field") {
  auto phi = [](double u, double v) { return v - 0.3 * std::sin(2.0 * u); };
  const ScalarField field = sample(32, 33, -1.0, 1.0, phi);
  ContourOptions opt;
  opt.continuous = phi;
  const auto curves = extract_level_curves(field, 0.0, opt);
  REQUIRE(curves.size() == 1);
  // Depth-20 bisection of a 0.0625-long edge locates the zero to ~6e-8.
  for (const auto& p : curves[0].pts) CHECK(std::abs(phi(p[0], p[1])) < 1e-7);
}

TEST_CASE("line integral of the curvature along a parallel") {
  auto m = make_catenoid();
  const ScalarField field = sample(64, 65, -2.0, 2.0, [](double, double v) { return v; });
  const auto curves = extract_level_curves(field, 0.4);
  REQUIRE(curves.size() == 1);
  const double got = polyline_integral(
      *m, curves[0], [&](double u, double v) { return m->gauss_curvature(u, v); });
  // K is constant on the parallel: integral = K * length = K * 2 pi cosh(v).
  const double v = 0.4;
  const double expect = -1.0 / std::pow(std::cosh(v), 4) * kTwoPi * std::cosh(v);
  CHECK(got == doctest::Approx(expect).epsilon(1e-9));
}
