#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cylab/contour.hpp"
#include "cylab/geodesic.hpp"
#include "cylab/metric.hpp"
#include "cylab/shooting.hpp"

namespace cylab {

// A unit-speed geodesic ray truncated at parameter t_max.  Rays are the
// anchors for Busemann functions: b(p) = lim d(p, ray(T)) - T.
class Ray {
 public:
  Ray(MetricPtr metric, Geodesic geodesic, double psi)
      : metric_(std::move(metric)), geodesic_(std::move(geodesic)), psi_(psi) {}

  const Geodesic& geodesic() const { return geodesic_; }
  const MetricPtr& metric() const { return metric_; }
  CylinderPoint base() const { return geodesic_.point(0.0); }
  double psi() const { return psi_; }
  double t_max() const { return geodesic_.length(); }
  CylinderPoint point(double t) const { return geodesic_.point(t); }

 private:
  MetricPtr metric_;
  Geodesic geodesic_;
  double psi_;
};

struct RayOptions {
  double t_max = 2048.0;
  OdeOptions ode = ode_precise();
  // Escape guard: |v(t_max) - v(0)| must exceed this and the endpoint must
  // still move away from the base.  Kept qualitative on purpose: rays with
  // sublinear axial speed (asymptotically cylindrical ends) are still rays.
  double min_axial_gain = 1.0;
};

Ray build_ray(const MetricPtr& metric, CylinderPoint base, double psi,
              const RayOptions& opt = {});

// Pairwise minimality certificate: a geodesic is a metric ray iff
// d(ray(s), ray(t)) = |t - s| for all s < t.  Checked on a sample grid.
struct RayCertificate {
  bool minimizing = false;
  double worst_gap = 0.0;  // max over pairs of |t - s| - d, always >= -tol
  double worst_s = 0.0;
  double worst_t = 0.0;
  int pairs = 0;
};

RayCertificate certify_ray(const Ray& ray, int samples = 20,
                           double rel_tol = 1e-6);

// Least-squares slope of t -> length of the shortest noncontractible loop
// through ray(t), fitted over the tail [t_lo_frac * t_max, t_max].  A ray
// suitable for exhaustion constructions needs slope < 1: loops must grow
// slower than distance along the ray, otherwise horoballs are not compact.
double loop_growth_slope(const Ray& ray, double t_lo_frac = 0.5,
                         int samples = 12);

struct BusemannOptions {
  double tol = 1e-3;       // stop doubling once |b_{2T} - b_T| < tol
  double t_start = 2.0;
  DistanceOptions distance = {};
};

struct BusemannValue {
  double value = 0.0;
  double last_delta = 0.0;
  double t_used = 0.0;
  bool converged = false;
};

// d(p, ray(T)) - T along the doubling schedule T = t_start, 2 t_start, ...
// capped at ray.t_max().  The sequence is nonincreasing (triangle
// inequality); a rise beyond rounding noise throws GeometryError.
BusemannValue busemann_value(const Ray& ray, CylinderPoint p,
                             const BusemannOptions& opt = {});

struct FieldOptions {
  int nu = 256;
  int nv = 1024;
  double v_min = -8.0;
  double v_max = 8.0;
  // A node counts as converged when the value at t_max/2 agrees with the
  // value at t_max to within check_tol.  The check runs on every
  // check_stride-th node in each direction (1 = every node).
  double check_tol = 5e-3;
  int check_stride = 4;
  // Node connects run at the precise setting: a long shot reproduces its
  // endpoint only to rtol * length in metric norm, and at field tolerances
  // that floor overwhelms the connect residual test.  Warm starts along each
  // row keep the cost near two Newton steps per node.
  OdeOptions ode = ode_precise();
  int threads = 1;
};

struct FieldStats {
  int total = 0;
  int unconverged = 0;
  double max_delta = 0.0;        // max |b_{T/2} - b_T| over nodes
  double max_newton_iters = 0.0; // worst Newton iteration count seen
};

struct BusemannField {
  ScalarField values;  // b_T with T = ray.t_max()
  FieldStats stats;
};

// Samples b_T on a grid, one warm-start chain per row so the result is
// byte-identical for every thread count.
BusemannField busemann_field(const Ray& ray, const FieldOptions& opt);

// Independent spot check: recompute b at n random nodes through the
// doubling schedule and report the largest discrepancy with the field.
double validate_field_sample(const Ray& ray, const BusemannField& field,
                             int n = 40, unsigned seed = 20240901);

// Two opposite rays combined into one proper function on the cylinder:
//   b = b_up   where b_up <= 0,
//   b = b_down where b_down <= 0,
//   b = 0      in between.
// The down ray is replaced by a subray (b_down + shift) when the two
// horoballs {b <= 0} overlap; shift is computed from the sampled fields and
// the subray identity, never by re-integration.
struct CombinedBusemann {
  ScalarField b;
  BusemannField up;    // field of the ray escaping to v -> +infinity
  BusemannField down;  // field of the ray escaping to v -> -infinity
  double shift = 0.0;  // added to the raw down-field
  int zero_band_nodes = 0;
  double slope_up = 0.0;    // measured loop growth slopes along the rays
  double slope_down = 0.0;
  bool loop_condition_ok = false;  // both slopes < loop_slope_limit
};

struct CombineOptions {
  FieldOptions field = {};
  // Loop growth l(gamma(t))/t along both rays is always measured and
  // reported.  A slope at or above the limit voids the flatness hypotheses;
  // by default that is an error, but the exhaustion itself only needs the
  // horoballs to separate, so callers may build it anyway on a window.
  double loop_slope_limit = 1.0;
  bool enforce_loop_condition = true;
};

CombinedBusemann combine_busemann(const Ray& up, const Ray& down,
                                  const CombineOptions& opt);

// Exhaustion of a rotationally symmetric cylinder by the signed meridian
// distance to the core band [core_lo, core_hi].  Meridians minimize between
// any two of their points (any path has length >= int sqrt(G) |dv|), so the
// meridian arc is the exact distance to the band, the sublevel boundaries
// are parallels, and the distance gradient has unit length; every series
// quantity downstream keeps its meaning.  Use it on flared ends, where
// shortest loops grow at unit rate or faster, two-ray horoballs spill
// sideways around the core, and no level of the combined field above is
// compact.  Loop growth along the two meridian rays is still measured and
// reported, never enforced: this construction does not need it.
struct CoreExhaustionOptions {
  FieldOptions field = {};     // grid geometry only; solver knobs are unused
  double loop_probe_t = 48.0;  // meridian span for the loop growth fit
  double loop_slope_limit = 1.0;
};

CombinedBusemann core_distance_exhaustion(const MetricPtr& m, double core_lo,
                                          double core_hi,
                                          const CoreExhaustionOptions& opt = {});

// Level set {b = -t} restricted to one end of the combined field.  For
// t > 0 this is a single closed curve of winding +-1 around the cylinder;
// anything else throws GeometryError.
enum class End { kUpper, kLower };

LevelCurve horocycle(const CombinedBusemann& cb, double t, End end,
                     const ContourOptions& opt = {});

// Continuous evaluator for b at t_max (used for contour refinement).
double busemann_at(const Ray& ray, CylinderPoint p, double t_eval,
                   const DistanceOptions& opt);

}  // namespace cylab
