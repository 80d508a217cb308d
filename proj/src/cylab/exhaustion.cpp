#include "cylab/exhaustion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cylab/errors.hpp"
#include "cylab/parallel.hpp"

namespace cylab {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

CheckItem make_item(std::string name, double lhs, double rhs, double slack) {
  CheckItem it;
  it.name = std::move(name);
  it.lhs = lhs;
  it.rhs = rhs;
  it.slack = slack;
  it.pass = lhs <= rhs + slack;
  return it;
}

// Trapezoid integral of y over ts between sample indices a <= b.
double trapz(const std::vector<SeriesSample>& s, double SeriesSample::*y, int a, int b) {
  double acc = 0.0;
  for (int i = a; i < b; ++i) {
    acc += 0.5 * (s[i].*y + s[i + 1].*y) * (s[i + 1].t - s[i].t);
  }
  return acc;
}

// Fraction of a triangle with vertex values (a, b, c) lying in {value >= 0}
// under the linear interpolant.
double kept_fraction(double a, double b, double c) {
  const bool ia = a >= 0.0, ib = b >= 0.0, ic = c >= 0.0;
  const int n = int(ia) + int(ib) + int(ic);
  if (n == 3) return 1.0;
  if (n == 0) return 0.0;
  if (n == 1) {
    if (ib) { std::swap(a, b); }
    else if (ic) { std::swap(a, c); }
    return (a * a) / ((a - b) * (a - c));
  }
  // Two vertices inside: complement of the single outside corner.
  if (!ia) { std::swap(a, c); }
  else if (!ib) { std::swap(b, c); }
  return 1.0 - (c * c) / ((c - a) * (c - b));
}

// Integrals of corner-sampled densities over {field + t >= 0}.  Each cell is
// split (after bilinear subdivision by `refine`) into four triangles around
// the center average; the kept fraction is exact for the linear interpolant
// per triangle and the density is averaged over corners.  Serial fixed-order
// accumulation keeps the result byte-deterministic.
void masked_integrals(const ScalarField& f, double t,
                      const std::vector<const std::vector<double>*>& dens,
                      int refine, double* out) {
  const int nd = static_cast<int>(dens.size());
  for (int d = 0; d < nd; ++d) out[d] = 0.0;
  const int nu = f.nu(), nv = f.nv(), r = std::max(1, refine);
  const double cell_area = f.du() * f.dv() / (r * r);
  const double tri_area = 0.25 * cell_area;

  std::vector<double> row_acc(nd);
  for (int j = 0; j + 1 < nv; ++j) {
    std::fill(row_acc.begin(), row_acc.end(), 0.0);
    for (int i = 0; i < nu; ++i) {
      const int i1 = (i + 1) % nu;
      const std::size_t c00 = std::size_t(j) * nu + i, c10 = std::size_t(j) * nu + i1;
      const std::size_t c01 = c00 + nu, c11 = std::size_t(j + 1) * nu + i1;
      const double s00 = f.at(i, j) + t, s10 = f.at(i1, j) + t;
      const double s01 = f.at(i, j + 1) + t, s11 = f.at(i1, j + 1) + t;
      // Whole cell inside: skip the subdivision.
      if (r == 1 && s00 >= 0 && s10 >= 0 && s01 >= 0 && s11 >= 0) {
        for (int d = 0; d < nd; ++d) {
          const std::vector<double>& w = *dens[d];
          row_acc[d] += cell_area * 0.25 * (w[c00] + w[c10] + w[c01] + w[c11]);
        }
        continue;
      }
      if (r == 1 && s00 < 0 && s10 < 0 && s01 < 0 && s11 < 0) continue;

      for (int sj = 0; sj < r; ++sj) {
        for (int si = 0; si < r; ++si) {
          const double x0 = double(si) / r, x1 = double(si + 1) / r;
          const double y0 = double(sj) / r, y1 = double(sj + 1) / r;
          auto lerp2 = [&](double v00, double v10, double v01, double v11, double x,
                           double y) {
            return v00 * (1 - x) * (1 - y) + v10 * x * (1 - y) + v01 * (1 - x) * y +
                   v11 * x * y;
          };
          const double q[4][2] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
          double sv[4];
          for (int c = 0; c < 4; ++c) sv[c] = lerp2(s00, s10, s01, s11, q[c][0], q[c][1]);
          const double sc = 0.25 * (sv[0] + sv[1] + sv[2] + sv[3]);
          double frac[4];
          bool any = false;
          for (int e = 0; e < 4; ++e) {
            frac[e] = kept_fraction(sv[e], sv[(e + 1) % 4], sc);
            any = any || frac[e] > 0.0;
          }
          if (!any) continue;
          for (int d = 0; d < nd; ++d) {
            const std::vector<double>& w = *dens[d];
            double dv4[4];
            for (int c = 0; c < 4; ++c)
              dv4[c] = lerp2(w[c00], w[c10], w[c01], w[c11], q[c][0], q[c][1]);
            const double dc = 0.25 * (dv4[0] + dv4[1] + dv4[2] + dv4[3]);
            double acc = 0.0;
            for (int e = 0; e < 4; ++e) {
              acc += frac[e] * (dv4[e] + dv4[(e + 1) % 4] + dc) / 3.0;
            }
            row_acc[d] += acc * tri_area;
          }
        }
      }
    }
    for (int d = 0; d < nd; ++d) out[d] += row_acc[d];
  }
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration from the
// Chebyshev guesses.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

int mirror_partner(int k, int nphi) {
  int p = (nphi / 2 - 1 - k) % nphi;
  if (p < 0) p += nphi;
  return p;
}

}  // namespace

UTable::UTable(int nv, int nphi, double v_min, double v_max)
    : nv_(nv), nphi_(nphi), v_min_(v_min), v_max_(v_max) {
  if (nv < 2 || nphi < 2 || !(v_max > v_min)) throw ConfigError("bad U-table grid");
  values_.assign(std::size_t(nv) * nphi, 0.0);
  row_u2_.assign(nv, 0.0);
  row_absu_.assign(nv, 0.0);
}

void UTable::finalize() {
  const double dphi = kTwoPi / nphi_;
  for (int j = 0; j < nv_; ++j) {
    double u2 = 0.0, au = 0.0;
    for (int k = 0; k < nphi_; ++k) {
      const double u = at(j, k);
      u2 += u * u;
      au += std::abs(u);
    }
    row_u2_[j] = u2 * dphi;
    row_absu_[j] = au * dphi;
  }
}

double UTable::row_value(const std::vector<double>& table, double v) const {
  const double x = std::clamp((v - v_min_) / (v_max_ - v_min_), 0.0, 1.0) * (nv_ - 1);
  const int j0 = std::min(static_cast<int>(x), nv_ - 2);
  const double f = x - j0;
  return table[j0] * (1.0 - f) + table[j0 + 1] * f;
}

double UTable::u2_integral(double v) const { return row_value(row_u2_, v); }
double UTable::absu_integral(double v) const { return row_value(row_absu_, v); }

double UTable::max_abs() const {
  double m = 0.0;
  for (double u : values_) m = std::max(m, std::abs(u));
  return m;
}

double UTable::unconverged_fraction() const {
  return values_.empty() ? 0.0 : double(unconverged_) / double(values_.size());
}

UTable build_u_table(const MetricPtr& m, int nv, double v_min, double v_max,
                     const UTableOptions& opt) {
  if (opt.nphi < 4 || opt.nphi % 2 != 0) throw ConfigError("nphi must be even and >= 4");
  UTable ut(nv, opt.nphi, v_min, v_max);

  // One column of solves stands for the whole cylinder only when the
  // coefficients are u-independent; probe a few heights.
  bool mirror = true;
  for (double fr : {0.0, 0.37, 0.71, 1.0}) {
    const double v = v_min + fr * (v_max - v_min);
    const FirstForm g0 = m->form(0.0, v);
    for (double u : {1.2345, 2.971}) {
      const FirstForm g = m->form(u, v);
      if (std::abs(g.E - g0.E) > 1e-9 * (1.0 + std::abs(g0.E)) ||
          std::abs(g.F - g0.F) > 1e-9 * (1.0 + std::abs(g0.F)) ||
          std::abs(g.G - g0.G) > 1e-9 * (1.0 + std::abs(g0.G))) {
        throw ConfigError("U-table requires u-independent metric coefficients");
      }
    }
    if (std::abs(g0.F) > 1e-12) mirror = false;
  }

  std::vector<char> conv(std::size_t(nv) * opt.nphi, 1);
  parallel_for(nv, opt.threads, [&](int j) {
    const double v = ut.v_of(j);
    for (int k = 0; k < opt.nphi; ++k) {
      const int p = mirror_partner(k, opt.nphi);
      if (mirror && p < k) {
        // u -> -u is an isometry when F == 0, sending phi to pi - phi.
        ut.at(j, k) = ut.at(j, p);
        conv[std::size_t(j) * opt.nphi + k] = conv[std::size_t(j) * opt.nphi + p];
        continue;
      }
      const HopfResult r = hopf_stable_riccati(*m, make_point(0.0, v), ut.phi_of(k), opt.hopf);
      ut.at(j, k) = r.value;
      conv[std::size_t(j) * opt.nphi + k] = r.converged ? 1 : 0;
    }
  });
  ut.unconverged_ = static_cast<int>(std::count(conv.begin(), conv.end(), char(0)));
  ut.finalize();
  return ut;
}

double max_abs_curvature(const CylinderMetric& m, double v_min, double v_max, int nu,
                         int nv) {
  double worst = 0.0;
  for (int j = 0; j < nv; ++j) {
    const double v = v_min + (v_max - v_min) * j / (nv - 1);
    for (int i = 0; i < nu; ++i) {
      worst = std::max(worst, std::abs(m.gauss_curvature(kTwoPi * i / nu, v)));
    }
  }
  return worst;
}

ExhaustionSeries compute_series(const MetricPtr& m, const CombinedBusemann& cb,
                                const UTable& ut, const std::vector<double>& ts,
                                const SeriesOptions& opt) {
  if (ts.empty()) throw ConfigError("empty level grid");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0)) throw ConfigError("series levels must be positive");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw ConfigError("series levels must increase");
  }

  const ScalarField& b = cb.b;
  const int nu = b.nu(), nv = b.nv();
  const std::size_t n = std::size_t(nu) * nv;
  std::vector<double> sqrtg(n), kdens(n), fdens(n);
  for (int j = 0; j < nv; ++j) {
    const double v = b.v_of(j);
    const double u2 = ut.u2_integral(v);
    for (int i = 0; i < nu; ++i) {
      const double u = b.u_of(i);
      const double ae = m->area_element(u, v);
      const std::size_t idx = std::size_t(j) * nu + i;
      sqrtg[idx] = ae;
      kdens[idx] = ae * m->gauss_curvature(u, v);
      fdens[idx] = ae * u2;
    }
  }

  ExhaustionSeries out;
  out.nphi = ut.nphi();
  out.grid_nu = nu;
  out.grid_nv = nv;
  out.hopf_unconverged_fraction = ut.unconverged_fraction();
  out.degraded = out.hopf_unconverged_fraction > 0.01;

  const std::vector<const std::vector<double>*> dens = {&sqrtg, &kdens, &fdens};
  for (double t : ts) {
    SeriesSample sp;
    sp.t = t;
    double acc[3];
    masked_integrals(b, t, dens, opt.refine, acc);
    sp.area = acc[0];
    sp.total_curvature = acc[1];
    sp.liouville_u2 = acc[2];

    try {
      for (End end : {End::kUpper, End::kLower}) {
        const LevelCurve curve = horocycle(cb, t, end, opt.contour);
        const double len = polyline_length(*m, curve);
        (end == End::kUpper ? sp.length_upper : sp.length_lower) = len;
        sp.boundary_length += len;
        sp.boundary_u2 += polyline_integral(
            *m, curve, [&](double, double v) { return ut.u2_integral(v); });
        sp.boundary_absu += polyline_integral(
            *m, curve, [&](double, double v) { return ut.absu_integral(v); });
        sp.boundary_k += polyline_integral(
            *m, curve, [&](double u, double v) { return m->gauss_curvature(u, v); });
      }
    } catch (const GeometryError& e) {
      throw GeometryError("horocycle extraction failed at t=" + fmt(t) + ": " + e.what());
    }
    out.samples.push_back(sp);
  }

  const int ns = static_cast<int>(out.samples.size());
  auto& s = out.samples;
  for (int i = 0; i < ns; ++i) {
    const int a = std::max(0, i - 1), c = std::min(ns - 1, i + 1);
    if (c > a) {
      s[i].liouville_u2_rate = (s[c].liouville_u2 - s[a].liouville_u2) / (s[c].t - s[a].t);
    }
  }

  for (int i = 0; i < ns; ++i) {
    const SeriesSample& sp = s[i];
    const bool finite = std::isfinite(sp.area) && std::isfinite(sp.total_curvature) &&
                        std::isfinite(sp.liouville_u2) && std::isfinite(sp.boundary_length);
    if (!finite) throw GeometryError("non-finite series entry at t=" + fmt(sp.t));
    if (!(sp.boundary_length > 0.0))
      throw GeometryError("empty exhaustion boundary at t=" + fmt(sp.t));
    if (i > 0) {
      if (sp.area < s[i - 1].area - 1e-9 * (1.0 + std::abs(sp.area)))
        throw GeometryError("area series decreases at t=" + fmt(sp.t));
      if (sp.liouville_u2 < s[i - 1].liouville_u2 - 1e-9 * (1.0 + sp.liouville_u2))
        throw GeometryError("Liouville series decreases at t=" + fmt(sp.t));
    }
  }
  return out;
}

bool CheckReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

const CheckItem* CheckReport::worst() const {
  const CheckItem* w = nullptr;
  for (const CheckItem& i : items) {
    if (!w || i.margin() < w->margin()) w = &i;
  }
  return w;
}

CheckReport verify_coarea(const ExhaustionSeries& s) {
  CheckReport rep;
  const auto& p = s.samples;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double ih = trapz(p, &SeriesSample::boundary_length, 0, static_cast<int>(i));
    rep.items.push_back(make_item("coarea-area@t=" + fmt(p[i].t),
                                  std::abs((p[i].area - p[0].area) - ih), 0.0,
                                  0.01 * (1.0 + std::abs(ih))));
    const double ik = trapz(p, &SeriesSample::boundary_k, 0, static_cast<int>(i));
    rep.items.push_back(
        make_item("coarea-curvature@t=" + fmt(p[i].t),
                  std::abs((p[i].total_curvature - p[0].total_curvature) - ik), 0.0,
                  0.01 * (1.0 + std::abs(ik))));
  }
  return rep;
}

CheckReport verify_fundamental(const ExhaustionSeries& s) {
  CheckReport rep;
  const auto& p = s.samples;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double h = p[i].boundary_length;
    const double rate = std::max(0.0, p[i].liouville_u2_rate);
    const double rhs = -kTwoPi * p[i].total_curvature + 2.0 * std::sqrt(kTwoPi * rate * h);
    rep.items.push_back(make_item("fundamental@t=" + fmt(p[i].t), p[i].liouville_u2, rhs,
                                  1e-2 * (1.0 + std::abs(rhs))));
    // The central-difference rate and the boundary fiber integral estimate
    // the same derivative; 5% covers the difference-stencil error.
    const double ref = std::max(std::abs(p[i].liouville_u2_rate), p[i].boundary_u2);
    rep.items.push_back(make_item("rate-vs-boundary@t=" + fmt(p[i].t),
                                  std::abs(p[i].liouville_u2_rate - p[i].boundary_u2), 0.0,
                                  0.05 * (1.0 + ref)));
  }
  return rep;
}

CheckReport verify_bol_fiala(const ExhaustionSeries& s) {
  CheckReport rep;
  const auto& p = s.samples;
  const int ns = static_cast<int>(p.size());
  for (int i = 0; i < ns; ++i) {
    for (int j = i + 1; j < ns; ++j) {
      const double iw = trapz(p, &SeriesSample::total_curvature, i, j);
      rep.items.push_back(
          make_item("bol-fiala@[" + fmt(p[i].t) + "," + fmt(p[j].t) + "]",
                    -(p[j].boundary_length - p[i].boundary_length) - iw, 0.0,
                    1e-2 * (1.0 + std::abs(iw))));
    }
  }
  for (int i = 1; i + 1 < ns; ++i) {
    const double hp =
        (p[i + 1].boundary_length - p[i - 1].boundary_length) / (p[i + 1].t - p[i - 1].t);
    CheckItem it;
    it.name = "hprime-plus-omega@t=" + fmt(p[i].t) + " (diagnostic)";
    it.lhs = std::abs(hp + p[i].total_curvature);
    it.pass = true;  // equality is specific to geodesic horocycles
    rep.items.push_back(it);
  }
  return rep;
}

CheckReport verify_liouville_bound(const ExhaustionSeries& s) {
  CheckReport rep;
  for (const SeriesSample& sp : s.samples) {
    const double rhs = -kTwoPi * sp.total_curvature + 2.0 * sp.boundary_absu;
    rep.items.push_back(make_item("liouville-bound@t=" + fmt(sp.t), sp.liouville_u2, rhs,
                                  1e-2 * (1.0 + std::abs(rhs))));
  }
  return rep;
}

namespace {

// v-height of a winding loop over the lifted angle x; u_lift along the loop
// must be strictly monotone (the loop is a graph over the circle).
double loop_height(const Geodesic& g, double x) {
  const double sgn = g.u_lift(g.length()) > g.u_lift(0.0) ? 1.0 : -1.0;
  double lo = 0.0, hi = g.length();
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sgn * (g.u_lift(mid) - x) < 0.0) lo = mid;
    else hi = mid;
  }
  return g.v(0.5 * (lo + hi));
}

void require_graph(const Geodesic& g) {
  const int n = 512;
  const double sgn = g.u_lift(g.length()) > g.u_lift(0.0) ? 1.0 : -1.0;
  double prev = g.u_lift(0.0);
  for (int i = 1; i <= n; ++i) {
    const double x = g.u_lift(g.length() * i / n);
    if (sgn * (x - prev) < -1e-12)
      throw GeometryError("loop is not a graph over the circle");
    prev = x;
  }
}

}  // namespace

GaussBonnetBand gauss_bonnet_subcylinder(const MetricPtr& m, const LoopResult& a,
                                         const LoopResult& b, int columns, int v_nodes,
                                         double panel_width) {
  if (std::abs(a.winding) != 1 || std::abs(b.winding) != 1)
    throw ConfigError("subcylinder loops must wind the cylinder once");
  if (!(panel_width > 0.0)) throw ConfigError("panel width must be positive");
  require_graph(a.geodesic);
  require_graph(b.geodesic);

  const Geodesic* lo = &a.geodesic;
  const Geodesic* hi = &b.geodesic;
  if (lo->v(0.0) > hi->v(0.0)) std::swap(lo, hi);

  std::vector<double> gx, gw;
  gauss_legendre(v_nodes, gx, gw);

  GaussBonnetBand band;
  band.min_gap = 1e300;
  double acc = 0.0;
  for (int q = 0; q < columns; ++q) {
    const double c = kTwoPi * (q + 0.5) / columns;
    auto lift_target = [&](const Geodesic& g) {
      const double x0 = g.u_lift(0.0);
      const double sgn = g.u_lift(g.length()) > x0 ? 1.0 : -1.0;
      const double off = sgn > 0 ? wrap_angle(c - x0) : -wrap_angle(x0 - c);
      return x0 + off;
    };
    const double v1 = loop_height(*lo, lift_target(*lo));
    const double v2 = loop_height(*hi, lift_target(*hi));
    band.min_gap = std::min(band.min_gap, v2 - v1);
    if (!(v2 > v1)) throw GeometryError("subcylinder loops intersect");
    const int panels = std::max(1, static_cast<int>(std::ceil((v2 - v1) / panel_width)));
    double col = 0.0;
    for (int s = 0; s < panels; ++s) {
      const double p1 = v1 + (v2 - v1) * s / panels;
      const double p2 = v1 + (v2 - v1) * (s + 1) / panels;
      double seg = 0.0;
      for (int k = 0; k < v_nodes; ++k) {
        const double v = 0.5 * (p1 + p2) + 0.5 * (p2 - p1) * gx[k];
        seg += gw[k] * m->gauss_curvature(c, v) * m->area_element(c, v);
      }
      col += seg * 0.5 * (p2 - p1);
    }
    acc += col;
  }
  band.omega = acc * kTwoPi / columns;
  band.check = make_item("gauss-bonnet-band", std::abs(band.omega), kTwoPi,
                         1e-2 * (1.0 + kTwoPi));
  return band;
}

void write_series_csv(std::ostream& os, const ExhaustionSeries& s) {
  os << "t,h,v,omega,F,Fprime\n";
  os << std::setprecision(17);
  for (const SeriesSample& p : s.samples) {
    os << p.t << ',' << p.boundary_length << ',' << p.area << ',' << p.total_curvature
       << ',' << p.liouville_u2 << ',' << p.liouville_u2_rate << '\n';
  }
}

}  // namespace cylab
