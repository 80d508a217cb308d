#pragma once

#include <optional>
#include <utility>

#include "cylab/geodesic.hpp"
#include "cylab/metric.hpp"

namespace cylab {

// Target in the universal cover: unwrapped u, plain v.
struct CoverTarget {
  double u_lift = 0.0;
  double v = 0.0;
};

struct ConnectOptions {
  OdeOptions ode = ode_precise();
  double tol = 1e-10;  // endpoint residual in metric norm, scaled by (1 + L)
  int max_iters = 60;
  // A solve that stops improving above tol but within stall_slack * tol is
  // accepted at its best iterate: the shot integration reproduces endpoints
  // only to its own error floor, which long arcs can leave above tol.
  double stall_slack = 100.0;
  // Warm start (psi, length); otherwise the chart chord seeds the solve.
  std::optional<std::pair<double, double>> guess;
};

struct ConnectResult {
  double psi = 0.0;
  double length = 0.0;
  int iters = 0;
  Geodesic geodesic;
};

// Geodesic from p to the given cover target by Newton in (psi, L), using the
// scalar Jacobi field for the angular derivative.  Without conjugate points
// the solution per target is unique and the result realizes the cover
// distance.  Throws ConvergenceError when every start fails.
ConnectResult connect_in_cover(const MetricPtr& m, CylinderPoint p, CoverTarget target,
                               const ConnectOptions& opt = {});

struct DistanceOptions {
  int max_deck = 3;
  std::optional<int> deck_hint;  // tried first, then the rest by chord size
  ConnectOptions connect;
};

struct DistanceResult {
  double distance = 0.0;
  int deck = 0;  // minimizing u-shift in full turns relative to nearest_du
  double psi = 0.0;
  Geodesic geodesic;
};

// Distance on the cylinder: minimum over deck shifts of the cover distance,
// with decks pruned by the min_radius chord bound.
DistanceResult cylinder_distance(const MetricPtr& m, CylinderPoint p, CylinderPoint q,
                                 const DistanceOptions& opt = {});

struct LoopResult {
  double length = 0.0;
  int winding = 0;
  double psi = 0.0;
  bool simple = false;
  Geodesic geodesic;
};

// Shortest noncontractible geodesic loop based at p: minimum over nonzero
// winding classes.  `simple` reports an embeddedness sweep of the loop.
LoopResult shortest_loop(const MetricPtr& m, CylinderPoint p, const DistanceOptions& opt = {});

// Self-intersection sweep of a geodesic drawn on the cylinder (adjacent
// segments skipped, neighbor deck copies included).
bool geodesic_self_intersects(const Geodesic& g, int samples = 512);

}  // namespace cylab
