#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cylab/busemann.hpp"
#include "cylab/riccati.hpp"
#include "cylab/shooting.hpp"

namespace cylab {

struct UTableOptions {
  // Fiber angles per point.  The integrand U(v, .)^2 loses smoothness at
  // grazing directions (Clairaut-trapped trajectories never meet the curved
  // band, so U drops to zero there) and the fiber rule needs this many nodes
  // before the total stops moving at the 1e-3 level.
  int nphi = 32;
  HopfOptions hopf = {};
  int threads = 1;
};

// Stable Riccati values U(p, phi) tabulated on a (v, phi) lattice.  Valid
// only for metrics whose coefficients do not depend on u (checked at build
// time), where one column of solves covers the whole cylinder.  Fiber angles
// sit at the midpoints phi_k = 2*pi*(k + 1/2) / nphi.
class UTable {
 public:
  UTable(int nv, int nphi, double v_min, double v_max);

  int nv() const { return nv_; }
  int nphi() const { return nphi_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  double v_of(int j) const { return v_min_ + (v_max_ - v_min_) * j / (nv_ - 1); }
  double phi_of(int k) const { return kTwoPi * (k + 0.5) / nphi_; }

  double at(int j, int k) const { return values_[static_cast<std::size_t>(j) * nphi_ + k]; }
  double& at(int j, int k) { return values_[static_cast<std::size_t>(j) * nphi_ + k]; }

  // Fiber integrals over phi at height v, linear between rows.
  double u2_integral(double v) const;    // int U(v, phi)^2 dphi
  double absu_integral(double v) const;  // int |U(v, phi)| dphi

  double max_abs() const;
  int unconverged() const { return unconverged_; }
  double unconverged_fraction() const;

  void finalize();  // recomputes the cached row integrals

 private:
  double row_value(const std::vector<double>& table, double v) const;

  int nv_, nphi_;
  double v_min_, v_max_;
  std::vector<double> values_;
  std::vector<double> row_u2_, row_absu_;
  int unconverged_ = 0;
  friend UTable build_u_table(const MetricPtr&, int, double, double,
                              const UTableOptions&);
};

// Throws ConfigError when the metric coefficients depend on u.  When F == 0
// the reflection u -> -u is an isometry and only half of the fiber angles are
// solved, the rest mirrored through phi -> pi - phi.
UTable build_u_table(const MetricPtr& m, int nv, double v_min, double v_max,
                     const UTableOptions& opt = {});

// Largest |K| on a sample grid of the window.
double max_abs_curvature(const CylinderMetric& m, double v_min, double v_max,
                         int nu = 64, int nv = 257);

// One row of the exhaustion series at level t: H_t = {b >= -t} with boundary
// h_t, plus the fiber-quadrature Liouville integrals used by the inequality
// checks.
struct SeriesSample {
  double t = 0.0;
  double boundary_length = 0.0;    // h(t), both ends
  double area = 0.0;               // area of H_t
  double total_curvature = 0.0;    // int_{H_t} K
  double liouville_u2 = 0.0;       // F(t) = int_{H_t} int_phi U^2
  double liouville_u2_rate = 0.0;  // dF/dt by central differences
  double boundary_u2 = 0.0;        // int_{h_t} int_phi U^2, rate cross-check
  double boundary_k = 0.0;         // int_{h_t} K
  double boundary_absu = 0.0;      // int_{h_t} int_phi |U|
  double length_upper = 0.0;       // per-end boundary lengths
  double length_lower = 0.0;
};

struct ExhaustionSeries {
  std::vector<SeriesSample> samples;
  int nphi = 0;
  int grid_nu = 0;
  int grid_nv = 0;
  double hopf_unconverged_fraction = 0.0;
  bool degraded = false;  // more than 1% of the Riccati solves unconverged
};

struct SeriesOptions {
  // Quadrature subdivision of each field cell (doubling refine is the
  // self-consistency gate: entries must move by well under 1%).
  int refine = 1;
  ContourOptions contour = {};
};

// Masked quadrature of the series quantities over the sublevels of the
// combined field.  Levels must be positive, strictly increasing, and deep
// enough that both horocycles stay inside the field window.
ExhaustionSeries compute_series(const MetricPtr& m, const CombinedBusemann& cb,
                                const UTable& ut, const std::vector<double>& ts,
                                const SeriesOptions& opt = {});

// One verified inequality lhs <= rhs + slack.
struct CheckItem {
  std::string name;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double margin() const { return rhs + slack - lhs; }
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool all_pass() const;
  const CheckItem* worst() const;  // smallest margin, null when empty
};

// Coarea identities: area(t) - area(t0) against the trapezoid integral of h,
// and the same shape for the total curvature against the boundary integrals
// of K.  Tolerance 1% relative.
CheckReport verify_coarea(const ExhaustionSeries& s);

// F <= -2*pi*omega + 2*sqrt(2*pi*F'*h) + slack at interior samples, with
// slack = 1e-2 * (1 + |rhs|).  Also cross-checks the central-difference F'
// against the boundary fiber integral of U^2.
CheckReport verify_fundamental(const ExhaustionSeries& s);

// h(t2) - h(t1) >= -int_{t1}^{t2} omega dt - slack over all sampled pairs.
// |h' + omega| at interior samples is reported as a diagnostic item that
// never fails (equality only holds when the horocycles are geodesic).
CheckReport verify_bol_fiala(const ExhaustionSeries& s);

// F <= -2*pi*omega + 2 * int_{h_t} int_phi |U| + slack at every sample: the
// boundary form of the Liouville bound behind the fundamental inequality.
CheckReport verify_liouville_bound(const ExhaustionSeries& s);

// Total curvature of the band between two disjoint winding-+-1 geodesic
// loops, by column-wise Gauss quadrature between the loop graphs, plus the
// Gauss-Bonnet bound |omega| < 2*pi + slack.
struct GaussBonnetBand {
  double omega = 0.0;
  double min_gap = 0.0;  // smallest v-separation of the loops over u
  CheckItem check;
};

// Curvature integral of the band enclosed by two disjoint winding loops.
// Each column integrates in v over panels no wider than panel_width, so a
// curvature bump much narrower than the band still lands on quadrature nodes.
GaussBonnetBand gauss_bonnet_subcylinder(const MetricPtr& m, const LoopResult& a,
                                         const LoopResult& b, int columns = 256,
                                         int v_nodes = 12, double panel_width = 0.5);

// CSV with header t,h,v,omega,F,Fprime.
void write_series_csv(std::ostream& os, const ExhaustionSeries& s);

}  // namespace cylab
