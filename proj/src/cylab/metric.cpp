#include "cylab/metric.hpp"

#include <cmath>

#include "cylab/errors.hpp"

namespace cylab {

namespace {

constexpr double kFdStep = 1e-4;

// 4th-order central first derivative.
template <class Fn>
double d1(Fn&& f, double x, double h = kFdStep) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// 4th-order central second derivative.
template <class Fn>
double d2(Fn&& f, double x, double h = kFdStep) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
         (12 * h * h);
}

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double brioschi(const FirstFormJet& j, double Evv, double Fuv, double Guu) {
  const double E = j.g.E, F = j.g.F, G = j.g.G;
  const double W = j.g.det();
  const double m1[3][3] = {
      {-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * j.Eu, j.Fu - 0.5 * j.Ev},
      {j.Fv - 0.5 * j.Gu, E, F},
      {0.5 * j.Gv, F, G},
  };
  const double m2[3][3] = {
      {0.0, 0.5 * j.Ev, 0.5 * j.Gu},
      {0.5 * j.Ev, E, F},
      {0.5 * j.Gu, F, G},
  };
  return (det3(m1) - det3(m2)) / (W * W);
}

}  // namespace

FirstFormJet CylinderMetric::jet(double u, double v) const {
  FirstFormJet j;
  j.g = form(u, v);
  j.Eu = d1([&](double x) { return form(x, v).E; }, u);
  j.Fu = d1([&](double x) { return form(x, v).F; }, u);
  j.Gu = d1([&](double x) { return form(x, v).G; }, u);
  j.Ev = d1([&](double x) { return form(u, x).E; }, v);
  j.Fv = d1([&](double x) { return form(u, x).F; }, v);
  j.Gv = d1([&](double x) { return form(u, x).G; }, v);
  return j;
}

double CylinderMetric::gauss_curvature(double u, double v) const {
  const FirstFormJet j = jet(u, v);
  double Evv, Fuv, Guu;
  if (has_analytic_jet()) {
    Evv = d1([&](double x) { return jet(u, x).Ev; }, v);
    Guu = d1([&](double x) { return jet(x, v).Gu; }, u);
    Fuv = d1([&](double x) { return jet(x, v).Fv; }, u);
  } else {
    Evv = d2([&](double x) { return form(u, x).E; }, v);
    Guu = d2([&](double x) { return form(x, v).G; }, u);
    Fuv = d1([&](double x) { return d1([&](double y) { return form(x, y).F; }, v); }, u);
  }
  return brioschi(j, Evv, Fuv, Guu);
}

double CylinderMetric::norm(double u, double v, double du, double dv) const {
  return std::sqrt(std::max(0.0, inner(u, v, du, dv, du, dv)));
}

double CylinderMetric::area_element(double u, double v) const {
  return std::sqrt(std::max(0.0, form(u, v).det()));
}

std::array<double, 2> CylinderMetric::rotate90(double u, double v, double du, double dv) const {
  const FirstForm g = form(u, v);
  const double sw = std::sqrt(g.det());
  return {-(g.F * du + g.G * dv) / sw, (g.E * du + g.F * dv) / sw};
}

std::array<double, 2> CylinderMetric::direction(double u, double v, double psi) const {
  const FirstForm g = form(u, v);
  const double e1u = 1.0 / std::sqrt(g.E);
  const auto e2 = rotate90(u, v, e1u, 0.0);
  return {std::cos(psi) * e1u + std::sin(psi) * e2[0], std::sin(psi) * e2[1]};
}

double CylinderMetric::angle_of(double u, double v, double du, double dv) const {
  const FirstForm g = form(u, v);
  const double e1u = 1.0 / std::sqrt(g.E);
  const auto e2 = rotate90(u, v, e1u, 0.0);
  const double x = inner(u, v, du, dv, e1u, 0.0);
  const double y = inner(u, v, du, dv, e2[0], e2[1]);
  return std::atan2(y, x);
}

Christoffels CylinderMetric::christoffels(double u, double v) const {
  const FirstFormJet j = jet(u, v);
  const double E = j.g.E, F = j.g.F, G = j.g.G;
  const double iW2 = 0.5 / j.g.det();
  Christoffels c;
  c.uuu = iW2 * (G * j.Eu - 2 * F * j.Fu + F * j.Ev);
  c.uuv = iW2 * (G * j.Ev - F * j.Gu);
  c.uvv = iW2 * (2 * G * j.Fv - G * j.Gu - F * j.Gv);
  c.vuu = iW2 * (2 * E * j.Fu - E * j.Ev - F * j.Eu);
  c.vuv = iW2 * (E * j.Gu - F * j.Ev);
  c.vvv = iW2 * (E * j.Gv - 2 * F * j.Fv + F * j.Gu);
  return c;
}

RevolutionMetric::RevolutionMetric(Profile profile)
    : CylinderMetric(profile.name), profile_(std::move(profile)) {
  // Convexity outside the curvature support makes the global radius minimum
  // live inside [support_lo, support_hi]; a fine sampling finds it.  The
  // 0.999 shave keeps the reported value a true lower bound even between
  // samples, which deck pruning relies on.
  const double lo = profile_.support_lo, hi = profile_.support_hi;
  double best = std::min(profile_.f(lo), profile_.f(hi));
  if (hi > lo) {
    const int n = 4096;
    for (int i = 0; i <= n; ++i) best = std::min(best, profile_.f(lo + (hi - lo) * i / n));
  }
  min_radius_ = 0.999 * best;
}

FirstForm RevolutionMetric::form(double, double v) const {
  const double f = profile_.f(v), df = profile_.df(v);
  return {f * f, 0.0, 1.0 + df * df};
}

FirstFormJet RevolutionMetric::jet(double, double v) const {
  const double f = profile_.f(v), df = profile_.df(v), ddf = profile_.ddf(v);
  FirstFormJet j;
  j.g = {f * f, 0.0, 1.0 + df * df};
  j.Ev = 2.0 * f * df;
  j.Gv = 2.0 * df * ddf;
  return j;
}

double RevolutionMetric::gauss_curvature(double, double v) const {
  const double f = profile_.f(v), df = profile_.df(v), ddf = profile_.ddf(v);
  const double w = 1.0 + df * df;
  return -ddf / (f * w * w);
}

Christoffels RevolutionMetric::christoffels(double, double v) const {
  const double f = profile_.f(v), df = profile_.df(v), ddf = profile_.ddf(v);
  const double w = 1.0 + df * df;
  Christoffels c;
  c.uuv = df / f;
  c.vuu = -f * df / w;
  c.vvv = df * ddf / w;
  return c;
}

void RevolutionMetric::geodesic_data(double, double v, Christoffels& c, double& curvature) const {
  const double f = profile_.f(v), df = profile_.df(v), ddf = profile_.ddf(v);
  const double w = 1.0 + df * df;
  c = Christoffels{};
  c.uuv = df / f;
  c.vuu = -f * df / w;
  c.vvv = df * ddf / w;
  curvature = -ddf / (f * w * w);
}

double RevolutionMetric::step_cap(double v) const {
  const double s = profile_.feature_scale;
  if (s <= 0.0) return 0.0;
  // Trajectories advance in v at most at unit rate (G >= 1), so an arc step
  // below 0.4 * gap cannot reach the support, and repeated steps approach it
  // geometrically until the feature-scale bound takes over.
  if (v < profile_.support_lo) return std::max(s, 0.4 * (profile_.support_lo - v));
  if (v > profile_.support_hi) return std::max(s, 0.4 * (v - profile_.support_hi));
  return s;
}

ExplicitMetric::ExplicitMetric(std::string name, FormFn form, JetFn jet, ScalarFn curvature,
                               double min_radius, double step_cap, double axial_floor)
    : CylinderMetric(std::move(name)),
      form_fn_(std::move(form)),
      jet_fn_(std::move(jet)),
      curv_fn_(std::move(curvature)),
      min_radius_(min_radius),
      step_cap_(step_cap),
      axial_floor_(axial_floor) {
  if (!form_fn_) throw ConfigError("explicit metric: coefficient callable is required");
}

FirstForm ExplicitMetric::form(double u, double v) const { return form_fn_(u, v); }

FirstFormJet ExplicitMetric::jet(double u, double v) const {
  if (jet_fn_) return jet_fn_(u, v);
  return CylinderMetric::jet(u, v);
}

double ExplicitMetric::gauss_curvature(double u, double v) const {
  if (curv_fn_) return curv_fn_(u, v);
  return CylinderMetric::gauss_curvature(u, v);
}

MetricPtr make_flat(double r) {
  return std::make_shared<RevolutionMetric>(constant_profile(r));
}

MetricPtr make_catenoid() {
  return std::make_shared<RevolutionMetric>(catenoid_profile());
}

MetricPtr make_smoothed_cone(const SmoothedConeParams& p) {
  return std::make_shared<RevolutionMetric>(smoothed_cone_profile(p));
}

MetricPtr make_spline(const std::vector<double>& v, const std::vector<double>& f) {
  return std::make_shared<RevolutionMetric>(spline_profile(v, f));
}

MetricPtr make_constant_negative(double a) {
  if (!(a > 0.0)) throw ConfigError("constant negative curvature: need a > 0");
  auto form = [a](double, double v) -> FirstForm {
    const double c = std::cosh(a * v);
    return {c * c, 0.0, 1.0};
  };
  auto jet = [a](double u, double v) -> FirstFormJet {
    FirstFormJet j;
    const double c = std::cosh(a * v), s = std::sinh(a * v);
    j.g = {c * c, 0.0, 1.0};
    j.Ev = 2.0 * a * c * s;
    (void)u;
    return j;
  };
  auto curv = [a](double, double) { return -a * a; };
  // Coefficients vary on the 1/a scale; saturated-cosh flanks are otherwise
  // indistinguishable from trivial runs for the step controller.  E >= 1,
  // G == 1, F == 0 back the chord bounds.
  return std::make_shared<ExplicitMetric>("constant_negative", form, jet, curv, 1.0, 1.0 / a, 1.0);
}

}  // namespace cylab
