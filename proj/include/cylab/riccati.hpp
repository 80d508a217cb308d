#pragma once

#include <functional>
#include <optional>

#include "cylab/geodesic.hpp"
#include "cylab/metric.hpp"
#include "cylab/ode.hpp"

namespace cylab {

// Solution of the scalar Riccati equation u' + u^2 + K(t) = 0 through the
// substitution u = w'/w, w'' + K w = 0: blow-up of u is the first zero of w.
class RiccatiSolution {
 public:
  RiccatiSolution(DenseOde<2> w, std::optional<double> blowup)
      : w_(std::move(w)), blowup_(blowup) {}

  // u(t); throws GeometryError at or beyond the blow-up time.
  double eval(double t) const;

  std::optional<double> blowup_time() const { return blowup_; }
  double t_max() const { return w_.t_end(); }

 private:
  DenseOde<2> w_;
  std::optional<double> blowup_;
};

RiccatiSolution riccati_solve(const std::function<double(double)>& curvature, double u0,
                              double t_max, const OdeOptions& opt = ode_precise());

// Backward-limit (stable) Riccati value at a unit tangent vector: the limit
// of w1(T)/w2(T) where (w1, w2) is the fundamental Jacobi basis along the
// reversed geodesic.  Converged when consecutive dyadic readings differ by
// less than tol.
struct HopfOptions {
  double tol = 2.5e-7;
  double t_cap = 8.4e6;
  OdeOptions ode = ode_precise();
};

struct HopfResult {
  double value = 0.0;
  double last_delta = 0.0;  // |U_T - U_{T/2}| at the final reading
  double t_used = 0.0;
  bool converged = false;
};

// Throws GeometryError if a conjugate point is met along the backward ray.
HopfResult hopf_stable_riccati(const CylinderMetric& m, CylinderPoint p, double psi,
                               const HopfOptions& opt = HopfOptions{});

}  // namespace cylab
