#include "cylab/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cylab/errors.hpp"

namespace cylab {

namespace {

struct ShotEnd {
  DenseOde<6> traj;
  double res_u, res_v, res_norm;
};

ShotEnd evaluate_shot(const CylinderMetric& m, CylinderPoint p, const CoverTarget& target,
                      double psi, double length, const OdeOptions& ode) {
  ShotEnd s{shoot_with_jacobi(m, p, psi, length, 0.0, 1.0, ode), 0, 0, 0};
  const auto& y = s.traj.knots.back().y;
  s.res_u = target.u_lift - y[0];
  s.res_v = target.v - y[1];
  s.res_norm = m.norm(y[0], y[1], s.res_u, s.res_v);
  return s;
}

// One Newton solve from a fixed start; nullopt when it stalls out of reach or
// diverges.
std::optional<ConnectResult> newton_connect(const MetricPtr& m, CylinderPoint p,
                                            const CoverTarget& target, double psi0, double L0,
                                            const ConnectOptions& opt) {
  double psi = psi0, L = std::max(L0, 1e-8);
  // Repackage the joint trajectory as a plain geodesic.
  auto package = [&m](ShotEnd&& s, double ps, double len, int it) {
    DenseOde<4> traj;
    traj.knots.reserve(s.traj.knots.size());
    for (const auto& k : s.traj.knots)
      traj.knots.push_back({k.t,
                            {k.y[0], k.y[1], k.y[2], k.y[3]},
                            {k.dy[0], k.dy[1], k.dy[2], k.dy[3]}});
    return ConnectResult{ps, len, it, Geodesic(m, std::move(traj), 0.0)};
  };
  // Best iterate seen, kept for stalled-solve acceptance: a long shot
  // reproduces its arrival point only to the integrator's own error floor, so
  // the residual can plateau above tol with no parameter able to do better.
  std::optional<ShotEnd> best;
  double best_psi = psi, best_L = L;
  int no_improve = 0;
  for (int it = 1; it <= opt.max_iters; ++it) {
    ShotEnd s = evaluate_shot(*m, p, target, psi, L, opt.ode);
    if (s.res_norm < opt.tol * (1.0 + L)) return package(std::move(s), psi, L, it);
    const auto& y = s.traj.knots.back().y;
    const auto n = m->rotate90(y[0], y[1], y[2], y[3]);
    const double w = y[4];
    const double a = y[2], b = w * n[0];
    const double c = y[3], d = w * n[1];
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-14) break;
    double dL = (s.res_u * d - b * s.res_v) / det;
    double dpsi = (a * s.res_v - s.res_u * c) / det;
    if (!best || s.res_norm < 0.8 * best->res_norm) {
      best = std::move(s);
      best_psi = psi;
      best_L = L;
      no_improve = 0;
    } else if (++no_improve >= 3 && best->res_norm < opt.stall_slack * opt.tol * (1.0 + best_L)) {
      return package(std::move(*best), best_psi, best_L, it);
    }
    dpsi = std::clamp(dpsi, -0.6, 0.6);
    const double cap = std::max(1.0, 0.3 * L);
    dL = std::clamp(dL, -cap, cap);
    psi += dpsi;
    L = std::max(1e-8, L + dL);
    if (L > 1e7) return std::nullopt;
  }
  if (best && best->res_norm < opt.stall_slack * opt.tol * (1.0 + best_L))
    return package(std::move(*best), best_psi, best_L, opt.max_iters);
  return std::nullopt;
}

// Half of a symmetric loop: geodesic from the turning meridian (pure +u
// direction at height v_star) until it first climbs back to v0.
struct HalfArc {
  bool crossed = false;
  double wrap = 0.0;    // u-lift gained at the crossing
  double length = 0.0;  // arc length to the crossing
  double du_c = 0.0, dv_c = 0.0;
};

HalfArc half_arc(const MetricPtr& m, double v_star, double v0, double arc_cap,
                 const OdeOptions& ode) {
  HalfArc out;
  const double e_turn = m->form(0.0, v_star).E;
  TangentVector x{make_point(0.0, v_star), 1.0 / std::sqrt(e_turn), 0.0};
  double total = 0.0, wrap = 0.0;
  const double chunk = std::max(4.0, 0.25 * arc_cap);
  // Which way the arc leaves the turn: up on the upper flank, down on the
  // lower one.
  const double side = (v0 >= v_star) ? 1.0 : -1.0;
  while (total < arc_cap) {
    Geodesic g = shoot_vector(m, x, chunk, ode);
    const auto& knots = g.dense().knots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      if (side * (knots[i + 1].y[1] - v0) < 0.0) continue;
      // First knot interval reaching v0: bisect the dense output.
      double lo = knots[i].t, hi = knots[i + 1].t;
      for (int it = 0; it < 80 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (side * (g.v(mid) - v0) < 0.0 ? lo : hi) = mid;
      }
      const double tc = 0.5 * (lo + hi);
      const auto y = g.state(tc);
      out.crossed = true;
      out.wrap = wrap + (y[0] - g.u_lift(0.0));
      out.length = total + tc;
      out.du_c = y[2];
      out.dv_c = y[3];
      return out;
    }
    wrap += g.u_lift(chunk) - g.u_lift(0.0);
    total += chunk;
    x = g.velocity(chunk);
  }
  return out;
}

// Seed (psi, L) for the winding-k based loop through p on a revolution
// surface.  Such a loop is symmetric about its turning meridian, so the
// turning height solves wrap(v_star) = pi k, a monotone one-dimensional
// problem.  Plain multistart cannot reach loops that linger along the waist:
// their basin in (psi, L) is exponentially thin on steep flanks.
std::optional<std::pair<double, double>> symmetric_loop_seed(const MetricPtr& m, CylinderPoint p,
                                                             int k, const OdeOptions& ode) {
  auto f = [&](double v) { return std::sqrt(m->form(0.0, v).E); };
  const double v0 = p.v;
  const double h = 1e-5;
  const double df0 = (f(v0 + h) - f(v0 - h)) / (2.0 * h);
  if (std::abs(df0) < 1e-9) return std::nullopt;
  const double dir = df0 > 0 ? -1.0 : 1.0;  // toward the waist

  double step = 0.02 * (1.0 + std::abs(v0));
  double cur = v0 + dir * step;
  if (!(f(cur) < f(v0))) return std::nullopt;
  int walked = 0;
  while (f(cur + dir * step) < f(cur)) {
    cur += dir * step;
    if (++walked > 20000) return std::nullopt;
  }
  // f has a local minimum within one step beyond cur; bisect f' for it.
  double a = cur - dir * step, b = cur + dir * step;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (a + b);
    const double d = (f(mid + h) - f(mid - h)) / (2.0 * h);
    if (d * dir < 0.0)
      a = mid;
    else
      b = mid;
  }
  const double waist = 0.5 * (a + b);

  // Meridian arc between waist and v0 sets the integration budget.
  double arc = 0.0;
  const int nq = 64;
  for (int i = 0; i < nq; ++i) {
    const double v = waist + (v0 - waist) * (i + 0.5) / nq;
    arc += std::sqrt(m->form(0.0, v).G);
  }
  arc *= std::abs(v0 - waist) / nq;
  const double arc_cap = 4.0 * arc + 8.0 * f(v0) * k + 50.0;

  const double target = kPi * k;
  auto wrap_at = [&](double lambda) {
    return half_arc(m, waist + lambda * (v0 - waist), v0, arc_cap, ode);
  };

  double lam_hi = 1.0 - 1e-7;  // near-parallel turn: small wrap
  HalfArc hi_arc = wrap_at(lam_hi);
  if (!hi_arc.crossed || hi_arc.wrap >= target) return std::nullopt;
  double lam_lo = 0.5;
  HalfArc lo_arc = wrap_at(lam_lo);
  while (lo_arc.crossed && lo_arc.wrap < target) {
    lam_lo *= 0.5;
    if (lam_lo < 1e-12) return std::nullopt;
    lo_arc = wrap_at(lam_lo);
  }

  HalfArc best = lo_arc;
  for (int it = 0; it < 70; ++it) {
    const double lam = 0.5 * (lam_lo + lam_hi);
    HalfArc mid = wrap_at(lam);
    if (!mid.crossed || mid.wrap >= target) {
      lam_lo = lam;
      if (mid.crossed) best = mid;
    } else {
      lam_hi = lam;
      best = mid;
    }
  }
  if (!best.crossed) return std::nullopt;
  // Departure at p mirrors the arrival velocity of the half arc.
  const double psi = m->angle_of(p.u, p.v, best.du_c, -best.dv_c);
  return std::make_pair(psi, 2.0 * best.length);
}

}  // namespace

ConnectResult connect_in_cover(const MetricPtr& m, CylinderPoint p, CoverTarget target,
                               const ConnectOptions& opt) {
  const double du = target.u_lift - p.u, dv = target.v - p.v;
  const double chord = m->norm(p.u, p.v, du, dv);
  if (chord < 1e-12) throw ConfigError("connect: coincident endpoints");

  double psi0, L0;
  if (opt.guess) {
    psi0 = opt.guess->first;
    L0 = opt.guess->second;
  } else {
    psi0 = m->angle_of(p.u, p.v, du, dv);
    L0 = chord;
  }
  if (auto r = newton_connect(m, p, target, psi0, L0, opt)) return std::move(*r);

  // Multistart fan; covers bad warm starts and strongly curved chords.
  const double chord_psi = m->angle_of(p.u, p.v, du, dv);
  for (int j = 0; j < 16; ++j) {
    const double psi = chord_psi + kTwoPi * j / 16.0;
    for (const double L : {chord, 1.5 * chord + 5.0}) {
      if (auto r = newton_connect(m, p, target, psi, L, opt)) return std::move(*r);
    }
  }
  throw ConvergenceError("connect: shooting failed from every start");
}

DistanceResult cylinder_distance(const MetricPtr& m, CylinderPoint p, CylinderPoint q,
                                 const DistanceOptions& opt) {
  const double du0 = nearest_du(p.u, q.u);
  const double f_min = m->min_radius();
  const double axial = m->axial_floor();
  const double dv = q.v - p.v;
  // Length of any deck-k candidate is at least the flat chord under the
  // declared coefficient floors; decks that cannot beat the current best are
  // skipped unsolved.
  auto deck_bound = [&](double du) {
    return axial > 0.0 ? std::hypot(f_min * du, axial * dv) : f_min * std::abs(du);
  };

  std::vector<int> decks;
  if (opt.deck_hint) decks.push_back(*opt.deck_hint);
  for (int k = 0; k <= opt.max_deck; ++k) {
    for (int s : {k, -k}) {
      if (k == 0 && s != k) continue;
      if (!opt.deck_hint || s != *opt.deck_hint) decks.push_back(s);
    }
  }
  // After the hint, try small chords first.
  std::stable_sort(decks.begin() + (opt.deck_hint ? 1 : 0), decks.end(),
                   [du0](int x, int y) { return std::abs(du0 + kTwoPi * x) < std::abs(du0 + kTwoPi * y); });

  std::optional<DistanceResult> best;
  for (int k : decks) {
    const double du = du0 + kTwoPi * k;
    if (best && deck_bound(du) >= best->distance) continue;
    ConnectOptions copt = opt.connect;
    if (copt.guess && k != (opt.deck_hint ? *opt.deck_hint : 0)) copt.guess.reset();
    ConnectResult r = connect_in_cover(m, p, {p.u + du, q.v}, copt);
    if (!best || r.length < best->distance)
      best = DistanceResult{r.length, k, r.psi, std::move(r.geodesic)};
  }
  return std::move(*best);
}

LoopResult shortest_loop(const MetricPtr& m, CylinderPoint p, const DistanceOptions& opt) {
  const bool symmetric = dynamic_cast<const RevolutionMetric*>(m.get()) != nullptr;
  const double f_min = m->min_radius();

  std::vector<int> windings;
  for (int k = 1; k <= std::max(1, opt.max_deck); ++k) {
    windings.push_back(k);
    if (!symmetric) windings.push_back(-k);
  }

  std::optional<LoopResult> best;
  for (int k : windings) {
    const double du = kTwoPi * k;
    if (best && std::abs(du) * f_min >= best->length) continue;
    const CoverTarget target{p.u + du, p.v};
    ConnectOptions copt = opt.connect;
    if (!copt.guess) {
      const double guessL = std::abs(du) * std::sqrt(m->form(p.u, p.v).E);
      copt.guess = {k > 0 ? 0.0 : kPi, guessL};
    }

    std::optional<ConnectResult> r =
        newton_connect(m, p, target, copt.guess->first, copt.guess->second, copt);
    if (!r && symmetric) {
      if (auto seed = symmetric_loop_seed(m, p, std::abs(k), copt.ode)) {
        double psi = seed->first;
        if (k < 0) psi = kPi - psi;  // mirror u -> -u
        r = newton_connect(m, p, target, psi, seed->second, copt);
      }
    }
    if (!r) {
      copt.guess.reset();
      r = connect_in_cover(m, p, target, copt);
    }
    if (!best || r->length < best->length)
      best = LoopResult{r->length, k, r->psi, false, std::move(r->geodesic)};
  }
  best->simple = !geodesic_self_intersects(best->geodesic);
  return std::move(*best);
}

namespace {

// Proper crossing test for chart segments (shared endpoints excluded by the
// caller skipping adjacent pairs).
bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy, double dx,
                    double dy) {
  auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
    return (qx - px) * (ry - py) - (qy - py) * (rx - px);
  };
  const double o1 = orient(ax, ay, bx, by, cx, cy);
  const double o2 = orient(ax, ay, bx, by, dx, dy);
  const double o3 = orient(cx, cy, dx, dy, ax, ay);
  const double o4 = orient(cx, cy, dx, dy, bx, by);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
         o4 != 0;
}

}  // namespace

bool geodesic_self_intersects(const Geodesic& g, int samples) {
  std::vector<double> us(samples + 1), vs(samples + 1);
  const double L = g.length();
  for (int i = 0; i <= samples; ++i) {
    const auto y = g.state(L * i / samples);
    us[i] = y[0];
    vs[i] = y[1];
  }
  for (int i = 0; i + 1 <= samples; ++i) {
    for (int j = i + 2; j + 1 <= samples; ++j) {
      // Endpoint contact of a closed loop is not a crossing.
      if (i == 0 && j + 1 == samples) continue;
      for (int shift = -1; shift <= 1; ++shift) {
        const double off = kTwoPi * shift;
        if (segments_cross(us[i], vs[i], us[i + 1], vs[i + 1], us[j] + off, vs[j],
                           us[j + 1] + off, vs[j + 1]))
          return true;
      }
    }
  }
  return false;
}

}  // namespace cylab
