#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "cylab/geometry.hpp"
#include "cylab/profile.hpp"

namespace cylab {

struct FirstForm {
  double E = 1.0, F = 0.0, G = 1.0;
  double det() const { return E * G - F * F; }
};

// First fundamental form together with its first chart derivatives.
struct FirstFormJet {
  FirstForm g;
  double Eu = 0, Ev = 0, Fu = 0, Fv = 0, Gu = 0, Gv = 0;
};

struct Christoffels {
  double uuu = 0, uuv = 0, uvv = 0;  // Gamma^u_{uu}, Gamma^u_{uv}, Gamma^u_{vv}
  double vuu = 0, vuv = 0, vvv = 0;  // Gamma^v_{uu}, Gamma^v_{uv}, Gamma^v_{vv}
};

// Complete Riemannian metric on the cylinder S^1 x R in the (u, v) chart,
// u periodic with period 2*pi.  All virtual entry points accept unwrapped u.
class CylinderMetric {
 public:
  explicit CylinderMetric(std::string name) : name_(std::move(name)) {}
  virtual ~CylinderMetric() = default;

  virtual FirstForm form(double u, double v) const = 0;
  virtual FirstFormJet jet(double u, double v) const;
  virtual double gauss_curvature(double u, double v) const;

  // True when jet() is analytic rather than finite-differenced; decides how
  // the Brioschi fallback obtains second derivatives.
  virtual bool has_analytic_jet() const { return false; }

  const std::string& name() const { return name_; }

  double inner(double u, double v, double du1, double dv1, double du2, double dv2) const {
    const FirstForm g = form(u, v);
    return g.E * du1 * du2 + g.F * (du1 * dv2 + dv1 * du2) + g.G * dv1 * dv2;
  }
  double norm(double u, double v, double du, double dv) const;
  double area_element(double u, double v) const;

  // Rotation by +90 degrees in the orientation of (d/du, d/dv).
  std::array<double, 2> rotate90(double u, double v, double du, double dv) const;

  // Unit vector at angle psi measured from the normalized d/du direction
  // toward rotate90 of it.
  std::array<double, 2> direction(double u, double v, double psi) const;

  // Inverse of direction() up to scaling: the frame angle of (du, dv).
  double angle_of(double u, double v, double du, double dv) const;

  virtual Christoffels christoffels(double u, double v) const;

  // Christoffels and curvature in one evaluation: the geodesic+Jacobi
  // right-hand sides are the hot path and shared coefficient work pays off.
  virtual void geodesic_data(double u, double v, Christoffels& c, double& curvature) const {
    c = christoffels(u, v);
    curvature = gauss_curvature(u, v);
  }

  // Global lower bound for sqrt(E) (the radius function on surfaces of
  // revolution); 0 when unknown.  Any path with chart u-extent |du| has
  // length >= min_radius * |du|, which prunes deck searches.
  virtual double min_radius() const { return 0.0; }

  // Global axial rate bound: a value a with ds^2 >= min_radius()^2 du^2 +
  // a^2 dv^2 for every tangent vector (in particular F == 0).  Sharpens the
  // deck prune to d >= hypot(min_radius * |du|, a * |dv|).  0 when no such
  // bound is declared.
  virtual double axial_floor() const { return 0.0; }

  // Largest integration step a trajectory currently at height v should
  // attempt.  Bounded near localized coefficient features and relaxing with
  // the distance to them, so long runs through trivial regions stay cheap
  // while approaches cannot step across the feature unsampled.  0 = no bound.
  virtual double step_cap(double /*v*/) const { return 0.0; }

 private:
  std::string name_;
};

// Surface of revolution: E = f(v)^2, F = 0, G = 1 + f'(v)^2.
class RevolutionMetric final : public CylinderMetric {
 public:
  explicit RevolutionMetric(Profile profile);

  FirstForm form(double u, double v) const override;
  FirstFormJet jet(double u, double v) const override;
  double gauss_curvature(double u, double v) const override;
  bool has_analytic_jet() const override { return true; }
  Christoffels christoffels(double u, double v) const override;
  void geodesic_data(double u, double v, Christoffels& c, double& curvature) const override;
  double min_radius() const override { return min_radius_; }
  // G = 1 + f'^2 >= 1 and F == 0.
  double axial_floor() const override { return 1.0; }
  double step_cap(double v) const override;

  const Profile& profile() const { return profile_; }

 private:
  Profile profile_;
  double min_radius_ = 0.0;
};

// Metric given by arbitrary coefficient callables, with optional analytic
// derivative and curvature callables.
class ExplicitMetric final : public CylinderMetric {
 public:
  using FormFn = std::function<FirstForm(double, double)>;
  using JetFn = std::function<FirstFormJet(double, double)>;
  using ScalarFn = std::function<double(double, double)>;

  ExplicitMetric(std::string name, FormFn form, JetFn jet = nullptr, ScalarFn curvature = nullptr,
                 double min_radius = 0.0, double step_cap = 0.0, double axial_floor = 0.0);

  FirstForm form(double u, double v) const override;
  FirstFormJet jet(double u, double v) const override;
  double gauss_curvature(double u, double v) const override;
  bool has_analytic_jet() const override { return static_cast<bool>(jet_fn_); }
  double min_radius() const override { return min_radius_; }
  double step_cap(double) const override { return step_cap_; }
  double axial_floor() const override { return axial_floor_; }

 private:
  FormFn form_fn_;
  JetFn jet_fn_;
  ScalarFn curv_fn_;
  double min_radius_ = 0.0;
  double step_cap_ = 0.0;
  double axial_floor_ = 0.0;
};

using MetricPtr = std::shared_ptr<const CylinderMetric>;

MetricPtr make_flat(double r);
MetricPtr make_catenoid();
MetricPtr make_smoothed_cone(const SmoothedConeParams& p);
MetricPtr make_spline(const std::vector<double>& v, const std::vector<double>& f);
// E = cosh^2(a v), F = 0, G = 1: constant curvature -a^2.  Not a revolution
// metric; exercises the general-coefficient paths with known closed forms.
MetricPtr make_constant_negative(double a);

}  // namespace cylab
