#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "cylab/errors.hpp"
#include "cylab/geometry.hpp"
#include "cylab/ode.hpp"

using namespace cylab;

TEST_CASE("exponential decay hits the closed form") {
  auto rhs = [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) {
    dy[0] = -y[0];
  };
  const auto sol = integrate<1>(rhs, {1.0}, 0.0, 10.0, ode_precise());
  CHECK(sol.knots.back().y[0] == doctest::Approx(std::exp(-10.0)).epsilon(1e-8));
  // Dense output between knots.
  for (double t : {0.37, 1.234, 5.5, 9.01})
    CHECK(sol.eval_component(t, 0) == doctest::Approx(std::exp(-t)).epsilon(1e-7));
}

TEST_CASE("harmonic oscillator: phase accuracy and energy") {
  auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  const double T = 20.0 * kPi;  // 10 periods
  const auto sol = integrate<2>(rhs, {1.0, 0.0}, 0.0, T, ode_precise());
  CHECK(sol.knots.back().y[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.knots.back().y[1] == doctest::Approx(0.0).epsilon(1e-6));
  for (const auto& k : sol.knots) {
    const double e = k.y[0] * k.y[0] + k.y[1] * k.y[1];
    CHECK(e == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("tolerance controls the error") {
  auto rhs = [](double t, const std::array<double, 1>& y, std::array<double, 1>& dy) {
    dy[0] = std::cos(t) * y[0];
  };
  OdeOptions loose{1e-4, 1e-6, 0.0, 0.0, 4000000};
  OdeOptions tight{1e-10, 1e-12, 0.0, 0.0, 4000000};
  const double T = 30.0;
  const double exact = std::exp(std::sin(T));
  const double e_loose = std::abs(integrate<1>(rhs, {1.0}, 0.0, T, loose).knots.back().y[0] - exact);
  const double e_tight = std::abs(integrate<1>(rhs, {1.0}, 0.0, T, tight).knots.back().y[0] - exact);
  CHECK(e_tight < e_loose);
  CHECK(e_tight < 1e-8);
  CHECK(e_loose < 1e-2);
}

TEST_CASE("post-step transform keeps an invariant pinned") {
  // Circle flow with deliberate drift; renormalization after each step keeps
  // the radius at 1 and the stored derivatives consistent for dense output.
  auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = -y[1] + 1e-3 * y[0];
    dy[1] = y[0] + 1e-3 * y[1];
  };
  auto renorm = [](double, std::array<double, 2>& y) {
    const double r = std::hypot(y[0], y[1]);
    y[0] /= r;
    y[1] /= r;
    return true;
  };
  const auto sol = integrate<2>(rhs, {1.0, 0.0}, 0.0, 50.0, ode_precise(), renorm);
  for (const auto& k : sol.knots)
    CHECK(std::hypot(k.y[0], k.y[1]) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("step underflow raises") {
  // Blow-up at t = 1: y' = y^2, y(0) = 1.
  auto rhs = [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) {
    dy[0] = y[0] * y[0];
  };
  CHECK_THROWS_AS(integrate<1>(rhs, {1.0}, 0.0, 2.0, ode_precise()), ConvergenceError);
}

TEST_CASE("bad interval rejected") {
  auto rhs = [](double, const std::array<double, 1>&, std::array<double, 1>& dy) { dy[0] = 0.0; };
  CHECK_THROWS_AS(integrate<1>(rhs, {0.0}, 1.0, 1.0, ode_precise()), ConfigError);
}
