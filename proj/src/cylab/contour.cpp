#include "cylab/contour.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "cylab/errors.hpp"

namespace cylab {

ScalarField::ScalarField(int nu, int nv, double v_min, double v_max)
    : nu_(nu), nv_(nv), v_min_(v_min), v_max_(v_max) {
  if (nu < 8 || nv < 2) throw ConfigError("scalar field: grid too small");
  if (!(v_min < v_max)) throw ConfigError("scalar field: empty v-window");
  data_.assign(static_cast<std::size_t>(nu) * nv, 0.0);
}

double ScalarField::eval(double u, double v) const {
  const double eps = 1e-9 * (v_max_ - v_min_);
  if (v < v_min_ - eps || v > v_max_ + eps)
    throw GeometryError("scalar field: evaluation outside the v-window");
  const double x = wrap_angle(u) / du();
  int i0 = static_cast<int>(std::floor(x));
  if (i0 >= nu_) i0 -= nu_;
  const double tx = x - i0;
  const int i1 = (i0 + 1) % nu_;
  double y = (v - v_min_) / dv();
  int j0 = static_cast<int>(std::floor(y));
  j0 = std::max(0, std::min(j0, nv_ - 2));
  const double ty = y - j0;
  const double f00 = at(i0, j0), f10 = at(i1, j0);
  const double f01 = at(i0, j0 + 1), f11 = at(i1, j0 + 1);
  return (1 - tx) * (1 - ty) * f00 + tx * (1 - ty) * f10 + (1 - tx) * ty * f01 + tx * ty * f11;
}

namespace {

struct Crossing {
  double u, v;  // chart position, u in [0, 2*pi + cell)
};

// Edge key: horizontal (node i,j -- i+1,j) or vertical (node i,j -- i,j+1).
int64_t edge_key(bool horizontal, int i, int j, int nu) {
  return (static_cast<int64_t>(j) * nu + i) * 2 + (horizontal ? 0 : 1);
}

}  // namespace

std::vector<LevelCurve> extract_level_curves(const ScalarField& field, double level,
                                             const ContourOptions& opt) {
  const int nu = field.nu(), nv = field.nv();
  const double du = field.du(), dv = field.dv();

  auto inside = [&](int i, int j) { return field.at(i, j) >= level; };

  std::unordered_map<int64_t, Crossing> points;
  auto horizontal_crossing = [&](int i, int j) {
    const int64_t key = edge_key(true, i, j, nu);
    auto it = points.find(key);
    if (it != points.end()) return key;
    const double fa = field.at(i, j), fb = field.at((i + 1) % nu, j);
    const double t = (level - fa) / (fb - fa);
    points.emplace(key, Crossing{field.u_of(i) + t * du, field.v_of(j)});
    return key;
  };
  auto vertical_crossing = [&](int i, int j) {
    const int64_t key = edge_key(false, i, j, nu);
    auto it = points.find(key);
    if (it != points.end()) return key;
    const double fa = field.at(i, j), fb = field.at(i, j + 1);
    const double t = (level - fa) / (fb - fa);
    points.emplace(key, Crossing{field.u_of(i), field.v_of(j) + t * dv});
    return key;
  };

  std::vector<std::pair<int64_t, int64_t>> segments;
  for (int j = 0; j + 1 < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const int i1 = (i + 1) % nu;
      const bool a = inside(i, j), b = inside(i1, j), c = inside(i1, j + 1), d = inside(i, j + 1);
      if (a == b && b == c && c == d) continue;

      std::vector<int64_t> crossed;
      const bool bottom = a != b, right = b != c, top = d != c, left = a != d;
      if (bottom && right && top && left) {
        // Saddle: split by the cell average.
        const double center =
            0.25 * (field.at(i, j) + field.at(i1, j) + field.at(i1, j + 1) + field.at(i, j + 1));
        const bool center_in = center >= level;
        if (center_in == a) {
          segments.emplace_back(horizontal_crossing(i, j), vertical_crossing(i1, j));
          segments.emplace_back(horizontal_crossing(i, j + 1), vertical_crossing(i, j));
        } else {
          segments.emplace_back(horizontal_crossing(i, j), vertical_crossing(i, j));
          segments.emplace_back(horizontal_crossing(i, j + 1), vertical_crossing(i1, j));
        }
        continue;
      }
      if (bottom) crossed.push_back(horizontal_crossing(i, j));
      if (right) crossed.push_back(vertical_crossing(i1, j));
      if (top) crossed.push_back(horizontal_crossing(i, j + 1));
      if (left) crossed.push_back(vertical_crossing(i, j));
      if (crossed.size() != 2)
        throw GeometryError("contour: inconsistent cell classification");
      segments.emplace_back(crossed[0], crossed[1]);
    }
  }

  // Each crossing must join exactly two segments, otherwise the component
  // leaves through the window boundary.
  std::unordered_map<int64_t, std::array<int, 2>> incident;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    for (const int64_t e : {segments[s].first, segments[s].second}) {
      auto [it, fresh] = incident.try_emplace(e, std::array<int, 2>{-1, -1});
      auto& slots = it->second;
      if (slots[0] < 0)
        slots[0] = s;
      else if (slots[1] < 0)
        slots[1] = s;
      else
        throw GeometryError("contour: crossing shared by more than two segments");
      (void)fresh;
    }
  }
  for (const auto& [e, slots] : incident) {
    if (slots[1] < 0)
      throw GeometryError(
          "contour: level curve reaches the window boundary; enlarge the v-window");
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<LevelCurve> curves;
  std::vector<std::vector<int64_t>> curve_edges;

  for (int s0 = 0; s0 < static_cast<int>(segments.size()); ++s0) {
    if (used[s0]) continue;
    std::vector<int64_t> chain;
    const int64_t start_edge = segments[s0].first;
    int64_t edge = start_edge;
    int seg = s0;
    do {
      used[seg] = true;
      chain.push_back(edge);
      const int64_t next_edge =
          (segments[seg].first == edge) ? segments[seg].second : segments[seg].first;
      const auto& slots = incident.at(next_edge);
      const int next_seg = (slots[0] == seg) ? slots[1] : slots[0];
      edge = next_edge;
      seg = next_seg;
    } while (edge != start_edge);

    LevelCurve c;
    c.pts.reserve(chain.size());
    double lift = 0.0, prev_u = 0.0, total = 0.0;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const Crossing& x = points.at(chain[k]);
      if (k == 0) {
        lift = x.u;
      } else {
        const double step = nearest_du(prev_u, x.u);
        lift += step;
        total += step;
      }
      prev_u = x.u;
      c.pts.push_back({lift, x.v});
    }
    total += nearest_du(prev_u, points.at(chain[0]).u);
    const double turns = total / kTwoPi;
    c.winding = static_cast<int>(std::lround(turns));
    if (std::abs(turns - c.winding) > 1e-6)
      throw GeometryError("contour: non-integer winding after chain closure");
    curves.push_back(std::move(c));
    curve_edges.push_back(std::move(chain));
  }

  if (opt.continuous) {
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
      auto& curve = curves[ci];
      const auto& chain = curve_edges[ci];
      for (std::size_t k = 0; k < chain.size(); ++k) {
        const int64_t e = chain[k];
        const bool horizontal = (e % 2) == 0;
        const int64_t cell = e / 2;
        const int i = static_cast<int>(cell % nu);
        const int j = static_cast<int>(cell / nu);
        // Grid edge endpoints in chart coordinates (u unwrapped past the seam
        // is fine: the callable is 2*pi-periodic in u).
        const double node_u = field.u_of(i), v0 = field.v_of(j);
        double lo_u = node_u, lo_v = v0;
        double hi_u = horizontal ? node_u + du : node_u;
        double hi_v = horizontal ? v0 : v0 + dv;
        double flo = opt.continuous(lo_u, lo_v) - level;
        double fhi = opt.continuous(hi_u, hi_v) - level;
        if (flo == 0.0) {
          curve.pts[k][1] = lo_v;
          continue;
        }
        if (flo * fhi > 0.0) continue;  // no bracket: keep the grid estimate
        double mu = 0.5 * (lo_u + hi_u), mv = 0.5 * (lo_v + hi_v);
        for (int depth = 0; depth < opt.refine_depth; ++depth) {
          const double fm = opt.continuous(mu, mv) - level;
          if (std::abs(fm) <= opt.refine_tol) break;
          if ((fm < 0.0) == (flo < 0.0)) {
            lo_u = mu;
            lo_v = mv;
            flo = fm;
          } else {
            hi_u = mu;
            hi_v = mv;
          }
          mu = 0.5 * (lo_u + hi_u);
          mv = 0.5 * (lo_v + hi_v);
        }
        // Preserve the existing lift: replace modulo the point's own offset.
        const double old_lift = curve.pts[k][0];
        curve.pts[k][0] = old_lift + nearest_du(wrap_angle(old_lift), wrap_angle(mu));
        curve.pts[k][1] = mv;
      }
    }
  }
  return curves;
}

namespace {
constexpr double kGlOff = 0.387298334620741688517926539978;  // sqrt(15)/10
constexpr double kGlX[3] = {0.5 - kGlOff, 0.5, 0.5 + kGlOff};
constexpr double kGlW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
}  // namespace

double polyline_length(const CylinderMetric& m, const LevelCurve& curve) {
  return polyline_integral(m, curve, [](double, double) { return 1.0; });
}

double polyline_integral(const CylinderMetric& m, const LevelCurve& curve,
                         const std::function<double(double, double)>& weight) {
  const std::size_t n = curve.pts.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = curve.pts[k];
    std::array<double, 2> b;
    if (k + 1 < n) {
      b = curve.pts[k + 1];
    } else {
      b = {curve.pts[0][0] + kTwoPi * curve.winding, curve.pts[0][1]};
    }
    const double du = b[0] - a[0], dv = b[1] - a[1];
    for (int q = 0; q < 3; ++q) {
      const double u = a[0] + kGlX[q] * du, v = a[1] + kGlX[q] * dv;
      acc += kGlW[q] * weight(u, v) * m.norm(u, v, du, dv);
    }
  }
  return acc;
}

}  // namespace cylab
