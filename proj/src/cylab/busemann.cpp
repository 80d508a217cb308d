#include "cylab/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "cylab/errors.hpp"
#include "cylab/parallel.hpp"

namespace cylab {

namespace {

// Warm-start chain for a sweep of nearby sources against one fixed target.
// target_lift is the u-lift of the winning target copy; it is invariant as
// the source moves, so the operative deck follows from it at any column.
struct WarmChain {
  bool valid = false;
  double target_lift = 0.0;
  double psi = 0.0;
  double length = 0.0;
};

struct NodeSolve {
  double length = 0.0;
  double du = 0.0;
  double psi = 0.0;
  int iters = 0;
};

// Minimizing connection from p to the cylinder point q, decks resolved
// locally: the nearest lift always competes, the warm lift is kept when it
// disagrees (the chain is crossing the cut behind q), and both neighbors
// join on cold starts near the antipodal seam.
NodeSolve solve_against_target(const MetricPtr& m, CylinderPoint p, CylinderPoint q,
                               const OdeOptions& ode, WarmChain& warm) {
  const double du0 = nearest_du(p.u, q.u);

  struct Candidate {
    double du;
    std::optional<std::pair<double, double>> guess;
  };
  std::vector<Candidate> cands;
  if (warm.valid) {
    const double du_pred = warm.target_lift - p.u;
    const double turns = std::round((du_pred - du0) / kTwoPi);
    const double du_warm = du0 + kTwoPi * turns;
    cands.push_back({du_warm, std::make_pair(warm.psi, warm.length)});
    if (turns != 0.0) cands.push_back({du0, std::nullopt});
  } else {
    cands.push_back({du0, std::nullopt});
    if (std::abs(du0) > kPi - 0.5) {
      cands.push_back({du0 - std::copysign(kTwoPi, du0), std::nullopt});
    }
  }

  ConnectOptions co;
  co.ode = ode;
  NodeSolve best;
  bool have = false;
  for (const auto& c : cands) {
    co.guess = c.guess;
    ConnectResult r = connect_in_cover(m, p, CoverTarget{p.u + c.du, q.v}, co);
    if (!have || r.length < best.length) {
      best = NodeSolve{r.length, c.du, r.psi, r.iters};
      have = true;
    }
  }
  warm.valid = true;
  warm.target_lift = p.u + best.du;
  warm.psi = best.psi;
  warm.length = best.length;
  return best;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-14) throw ConfigError("slope fit needs spread-out samples");
  return (n * sxy - sx * sy) / det;
}

}  // namespace

Ray build_ray(const MetricPtr& metric, CylinderPoint base, double psi,
              const RayOptions& opt) {
  Geodesic g = shoot(metric, base, psi, opt.t_max, opt.ode);
  const double gain = g.v(opt.t_max) - g.v(0.0);
  if (std::abs(gain) < opt.min_axial_gain) {
    std::ostringstream os;
    os << "ray gains only |dv| = " << std::abs(gain) << " over length " << opt.t_max
       << "; it does not reach an end";
    throw GeometryError(os.str());
  }
  const TangentVector end = g.velocity(opt.t_max);
  if (end.dv * gain <= 0.0) {
    throw GeometryError("ray turns back toward its base near t_max");
  }
  return Ray(metric, std::move(g), psi);
}

RayCertificate certify_ray(const Ray& ray, int samples, double rel_tol) {
  if (samples < 3) throw ConfigError("certify_ray needs at least 3 samples");
  const double T = ray.t_max();
  RayCertificate cert;
  cert.minimizing = true;
  DistanceOptions dopt;
  for (int a = 0; a < samples; ++a) {
    for (int b = a + 1; b < samples; ++b) {
      const double s = T * a / (samples - 1);
      const double t = T * b / (samples - 1);
      const double d = cylinder_distance(ray.metric(), ray.point(s), ray.point(t), dopt).distance;
      const double gap = (t - s) - d;
      ++cert.pairs;
      if (std::abs(gap) > std::abs(cert.worst_gap)) {
        cert.worst_gap = gap;
        cert.worst_s = s;
        cert.worst_t = t;
      }
      if (gap > rel_tol * (1.0 + (t - s))) cert.minimizing = false;
    }
  }
  return cert;
}

double loop_growth_slope(const Ray& ray, double t_lo_frac, int samples) {
  if (samples < 2) throw ConfigError("loop_growth_slope needs at least 2 samples");
  const double T = ray.t_max();
  const double t_lo = t_lo_frac * T;
  std::vector<double> ts, ls;
  DistanceOptions dopt;
  dopt.max_deck = 1;
  std::optional<std::pair<double, double>> warm;
  for (int k = 0; k < samples; ++k) {
    const double t = t_lo + (T - t_lo) * k / (samples - 1);
    dopt.connect.guess = warm;
    LoopResult loop = shortest_loop(ray.metric(), ray.point(t), dopt);
    ts.push_back(t);
    ls.push_back(loop.length);
    warm = std::make_pair(loop.psi, loop.length);
  }
  return fit_slope(ts, ls);
}

BusemannValue busemann_value(const Ray& ray, CylinderPoint p,
                             const BusemannOptions& opt) {
  if (opt.t_start <= 0.0) throw ConfigError("busemann_value needs t_start > 0");
  const double T_cap = ray.t_max();
  DistanceOptions dopt = opt.distance;
  BusemannValue out;
  bool first = true;
  double t = std::min(opt.t_start, T_cap);
  while (true) {
    DistanceResult d = cylinder_distance(ray.metric(), p, ray.point(t), dopt);
    const double b = d.distance - t;
    if (!first) {
      out.last_delta = std::abs(b - out.value);
      // d(p, ray(t')) <= d(p, ray(t)) + (t' - t) makes b nonincreasing.
      if (b > out.value + 1e-8 * (1.0 + t)) {
        std::ostringstream os;
        os << "Busemann sequence increased by " << b - out.value << " at t = " << t
           << "; the curve is not a metric ray there";
        throw GeometryError(os.str());
      }
    }
    out.value = b;
    out.t_used = t;
    if (!first && opt.tol > 0.0 && out.last_delta < opt.tol) {
      out.converged = true;
      break;
    }
    if (t >= T_cap) {
      out.converged = !first && opt.tol > 0.0 && out.last_delta < opt.tol;
      break;
    }
    first = false;
    const double t_next = std::min(2.0 * t, T_cap);
    dopt.deck_hint = d.deck;
    dopt.connect.guess = std::make_pair(d.psi, d.distance + (t_next - t));
    t = t_next;
  }
  return out;
}

BusemannField busemann_field(const Ray& ray, const FieldOptions& opt) {
  if (opt.check_stride < 1) throw ConfigError("check_stride must be >= 1");
  const double T = ray.t_max();
  const CylinderPoint q_full = ray.point(T);
  const CylinderPoint q_half = ray.point(0.5 * T);
  const MetricPtr& m = ray.metric();

  BusemannField out{ScalarField(opt.nu, opt.nv, opt.v_min, opt.v_max), FieldStats{}};
  ScalarField& field = out.values;

  struct RowStats {
    int unconverged = 0;
    double max_delta = 0.0;
    int max_iters = 0;
  };
  std::vector<RowStats> rows(opt.nv);

  parallel_for(opt.nv, opt.threads, [&](int j) {
    WarmChain warm_full, warm_half;
    RowStats& rs = rows[j];
    const double v = field.v_of(j);
    for (int i = 0; i < opt.nu; ++i) {
      const CylinderPoint p = make_point(field.u_of(i), v);
      NodeSolve full = solve_against_target(m, p, q_full, opt.ode, warm_full);
      field.at(i, j) = full.length - T;
      rs.max_iters = std::max(rs.max_iters, full.iters);
      if (j % opt.check_stride == 0 && i % opt.check_stride == 0) {
        NodeSolve half = solve_against_target(m, p, q_half, opt.ode, warm_half);
        const double delta = std::abs((half.length - 0.5 * T) - field.at(i, j));
        rs.max_delta = std::max(rs.max_delta, delta);
        if (delta > opt.check_tol) ++rs.unconverged;
      }
    }
  });

  out.stats.total = opt.nu * opt.nv;
  for (const RowStats& rs : rows) {
    out.stats.unconverged += rs.unconverged;
    out.stats.max_delta = std::max(out.stats.max_delta, rs.max_delta);
    out.stats.max_newton_iters = std::max(out.stats.max_newton_iters,
                                          static_cast<double>(rs.max_iters));
  }
  return out;
}

double validate_field_sample(const Ray& ray, const BusemannField& field,
                             int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pick_i(0, field.values.nu() - 1);
  std::uniform_int_distribution<int> pick_j(0, field.values.nv() - 1);
  BusemannOptions bopt;
  bopt.tol = 0.0;  // run the full ladder; the cap value is what the field stores
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const int i = pick_i(rng);
    const int j = pick_j(rng);
    const CylinderPoint p = make_point(field.values.u_of(i), field.values.v_of(j));
    const BusemannValue bv = busemann_value(ray, p, bopt);
    worst = std::max(worst, std::abs(bv.value - field.values.at(i, j)));
  }
  return worst;
}

CombinedBusemann combine_busemann(const Ray& up, const Ray& down,
                                  const CombineOptions& opt) {
  const double up_gain = up.geodesic().v(up.t_max()) - up.geodesic().v(0.0);
  const double down_gain = down.geodesic().v(down.t_max()) - down.geodesic().v(0.0);
  if (up_gain <= 0.0) throw ConfigError("first ray must escape toward v -> +inf");
  if (down_gain >= 0.0) throw ConfigError("second ray must escape toward v -> -inf");

  CombinedBusemann out{ScalarField(opt.field.nu, opt.field.nv, opt.field.v_min,
                                   opt.field.v_max),
                       BusemannField{ScalarField(8, 2, 0, 1), {}},
                       BusemannField{ScalarField(8, 2, 0, 1), {}},
                       0.0, 0, 0.0, 0.0};

  out.slope_up = loop_growth_slope(up);
  out.slope_down = loop_growth_slope(down);
  const double worst = std::max(out.slope_up, out.slope_down);
  out.loop_condition_ok = worst < opt.loop_slope_limit;
  if (!out.loop_condition_ok && opt.enforce_loop_condition) {
    std::ostringstream os;
    os << "shortest loops grow at rate " << worst << " (>= " << opt.loop_slope_limit
       << ") along the rays, so the flatness hypotheses fail; set "
          "enforce_loop_condition=false to build the exhaustion on a window anyway";
    throw GeometryError(os.str());
  }

  out.up = busemann_field(up, opt.field);
  out.down = busemann_field(down, opt.field);
  const ScalarField& bu = out.up.values;
  const ScalarField& bd = out.down.values;

  // Subray shift: replacing ray(.) by ray(t0 + .) adds t0 to its Busemann
  // function exactly, so disjointness is arranged on the sampled values.
  double t0 = -1e300;
  for (int j = 0; j < bu.nv(); ++j) {
    for (int i = 0; i < bu.nu(); ++i) {
      if (bu.at(i, j) <= 0.0) t0 = std::max(t0, -bd.at(i, j));
    }
  }
  out.shift = t0 > 0.0 ? 1.1 * t0 + 0.05 : 0.0;

  for (int j = 0; j < bu.nv(); ++j) {
    for (int i = 0; i < bu.nu(); ++i) {
      const double a = bu.at(i, j);
      const double b = bd.at(i, j) + out.shift;
      if (a <= 0.0 && b <= 0.0) {
        throw GeometryError("horoballs still overlap after the subray shift");
      }
      double val = 0.0;
      if (a <= 0.0) {
        val = a;
      } else if (b <= 0.0) {
        val = b;
      } else {
        ++out.zero_band_nodes;
      }
      out.b.at(i, j) = val;
    }
  }
  if (out.zero_band_nodes == 0) {
    throw GeometryError("no zero band between the horoballs; enlarge the v-window");
  }
  return out;
}

namespace {

// Signed meridian arc int_a^b sqrt(G(v)) dv, composite 8-point
// Gauss-Legendre on panels no wider than 0.5.
double meridian_arc(const CylinderMetric& m, double a, double b) {
  static const double gx[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
  static const double gw[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / 0.5)));
  double acc = 0.0;
  for (int s = 0; s < panels; ++s) {
    const double p1 = a + (b - a) * s / panels;
    const double p2 = a + (b - a) * (s + 1) / panels;
    const double mid = 0.5 * (p1 + p2), half = 0.5 * (p2 - p1);
    double seg = 0.0;
    for (int k = 0; k < 4; ++k) {
      seg += gw[k] * (std::sqrt(m.form(0.0, mid + half * gx[k]).G) +
                      std::sqrt(m.form(0.0, mid - half * gx[k]).G));
    }
    acc += seg * half;
  }
  return acc;
}

}  // namespace

CombinedBusemann core_distance_exhaustion(const MetricPtr& m, double core_lo,
                                          double core_hi,
                                          const CoreExhaustionOptions& opt) {
  if (!(core_lo <= core_hi)) throw ConfigError("core band needs core_lo <= core_hi");
  const FieldOptions& f = opt.field;
  if (!(f.v_min < core_lo && core_hi < f.v_max)) {
    throw ConfigError("core band must lie strictly inside the v-window");
  }
  // The meridian arc equals the distance to the band only when the
  // coefficients do not depend on u and the coordinate lines are orthogonal.
  for (double v : {f.v_min, core_lo, 0.5 * (core_lo + core_hi), core_hi, f.v_max}) {
    const FirstForm g0 = m->form(0.0, v);
    if (std::abs(g0.F) > 1e-12) {
      throw ConfigError("signed meridian distance requires F == 0");
    }
    for (double u : {1.2345, 2.971}) {
      const FirstForm g = m->form(u, v);
      if (std::abs(g.E - g0.E) > 1e-9 * (1.0 + std::abs(g0.E)) ||
          std::abs(g.F - g0.F) > 1e-9 ||
          std::abs(g.G - g0.G) > 1e-9 * (1.0 + std::abs(g0.G))) {
        throw ConfigError("signed meridian distance requires u-independent coefficients");
      }
    }
  }

  CombinedBusemann out{ScalarField(f.nu, f.nv, f.v_min, f.v_max),
                       BusemannField{ScalarField(f.nu, f.nv, f.v_min, f.v_max), {}},
                       BusemannField{ScalarField(f.nu, f.nv, f.v_min, f.v_max), {}},
                       0.0, 0, 0.0, 0.0};
  for (int j = 0; j < f.nv; ++j) {
    const double v = out.b.v_of(j);
    // Decreasing toward the owned end, positive on the far side of the core.
    const double bu = -meridian_arc(*m, core_hi, v);
    const double bd = meridian_arc(*m, core_lo, v);
    const double val = bu <= 0.0 ? bu : (bd <= 0.0 ? bd : 0.0);
    if (val == 0.0) out.zero_band_nodes += f.nu;
    for (int i = 0; i < f.nu; ++i) {
      out.up.values.at(i, j) = bu;
      out.down.values.at(i, j) = bd;
      out.b.at(i, j) = val;
    }
  }
  if (out.zero_band_nodes == 0) {
    throw GeometryError("no grid row lands on the core band; refine the v-grid");
  }
  out.up.stats.total = f.nu * f.nv;
  out.down.stats.total = f.nu * f.nv;

  RayOptions ro;
  ro.t_max = opt.loop_probe_t;
  out.slope_up = loop_growth_slope(build_ray(m, make_point(0.0, core_hi), kPi / 2, ro));
  out.slope_down =
      loop_growth_slope(build_ray(m, make_point(0.0, core_lo), -kPi / 2, ro));
  out.loop_condition_ok = std::max(out.slope_up, out.slope_down) < opt.loop_slope_limit;
  return out;
}

LevelCurve horocycle(const CombinedBusemann& cb, double t, End end,
                     const ContourOptions& opt) {
  if (t <= 0.0) throw ConfigError("horocycle levels need t > 0");
  std::vector<LevelCurve> curves = extract_level_curves(cb.b, -t, opt);
  if (curves.empty()) {
    throw GeometryError("no horocycle at this level inside the window");
  }
  if (curves.size() > 2) {
    throw GeometryError("level set of the combined Busemann field has more than "
                        "two components");
  }
  auto mean_v = [](const LevelCurve& c) {
    double s = 0.0;
    for (const auto& p : c.pts) s += p[1];
    return s / static_cast<double>(c.pts.size());
  };
  std::sort(curves.begin(), curves.end(), [&](const LevelCurve& a, const LevelCurve& b) {
    return mean_v(a) < mean_v(b);
  });
  const LevelCurve& chosen = (end == End::kUpper) ? curves.back() : curves.front();

  // The picked component must lie in the horoball of the requested end; test
  // the per-ray field there instead of trusting curve ordering.
  const ScalarField& own = (end == End::kUpper) ? cb.up.values : cb.down.values;
  const double shift = (end == End::kUpper) ? 0.0 : cb.shift;
  const auto& probe = chosen.pts[chosen.pts.size() / 2];
  const double own_val = own.eval(probe[0], probe[1]) + shift;
  if (std::abs(own_val + t) > 0.2 * (1.0 + t)) {
    throw GeometryError("horocycle for the requested end is not inside the window");
  }
  if (chosen.winding != 1 && chosen.winding != -1) {
    throw GeometryError("horocycle does not wind once around the cylinder");
  }
  return chosen;
}

double busemann_at(const Ray& ray, CylinderPoint p, double t_eval,
                   const DistanceOptions& opt) {
  return cylinder_distance(ray.metric(), p, ray.point(t_eval), opt).distance - t_eval;
}

}  // namespace cylab
