#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "mlab/geometry.hpp"
#include "mlab/predicates.hpp"

namespace mlab {

namespace {

constexpr double kPi = std::numbers::pi;

double turn_angle(planar_point in, planar_point out) {
  return std::atan2(cross(in, out), dot(in, out));
}

double shoelace_area(const polyline& c) {
  stable_sum acc;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    acc += cross(c.vertices[i], c.vertices[i + 1]);
  return 0.5 * acc.value();
}

}  // namespace

double turning_report::residual() const {
  return std::fabs(smooth_turning + corner_sum - 2.0 * kPi);
}

curvature_report signed_curvature(const polyline& c,
                                  const std::vector<std::size_t>& smooth_breaks) {
  std::size_t n = c.size();
  require(n >= 3, errc::invalid_argument, "curvature needs >= 3 vertices");

  double mean = c.length() / static_cast<double>(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double seg = c.cum_arclength[i + 1] - c.cum_arclength[i];
    if (std::fabs(seg - mean) > 0.05 * mean)
      fail(errc::non_uniform_parametrization,
           "arclength spacing deviates more than 5% from uniform");
  }

  std::vector<bool> is_break(n, false);
  for (std::size_t b : smooth_breaks) {
    require(b < n, errc::invalid_argument, "break index out of range");
    is_break[b] = true;
    if (c.closed && (b == 0 || b + 1 == n)) is_break[0] = is_break[n - 1] = true;
  }

  // Interior vertices: 1..n-2 always; for closed curves the seam vertex
  // (index 0 == n-1) is interior as well.
  curvature_report report;
  report.kappa.assign(n, std::numeric_limits<double>::quiet_NaN());

  auto incoming = [&](std::size_t i) -> planar_point {
    std::size_t prev = (i == 0) ? n - 2 : i - 1;  // n-2: seam of a closed curve
    return c.vertices[i] - c.vertices[prev];
  };
  auto outgoing = [&](std::size_t i) -> planar_point {
    return c.vertices[i + 1 == n ? 1 : i + 1] - c.vertices[i];
  };

  auto visit = [&](std::size_t i) {
    planar_point din = incoming(i), dout = outgoing(i);
    double angle = turn_angle(din, dout);
    if (is_break[i]) {
      corner corn;
      corn.vertex = i;
      corn.delta = angle;
      // Cusp: reversal of direction; the +/-pi sign is resolved by testing a
      // point just beyond the tip against the enclosed region.
      if (std::fabs(std::fabs(angle) - kPi) < 1e-9 && c.closed) {
        corn.cusp = true;
        planar_point tip_dir = (1.0 / norm(din)) * din;
        double base = std::max(norm(din), norm(dout));
        bool toward_domain = false;
        for (double h = 0.25 * base; h > 1e-6 * base; h *= 0.5) {
          planar_point probe = c.vertices[i] + h * tip_dir;
          try {
            toward_domain = winding_number(c, probe, 1e-14 * base) != 0;
            break;
          } catch (const error&) {
            continue;  // probe hit the support; shrink
          }
        }
        corn.delta = toward_domain ? -kPi : kPi;
      }
      report.corners.push_back(corn);
    } else {
      double ds = 0.5 * (norm(din) + norm(dout));
      report.kappa[i] = angle / ds;
    }
  };

  for (std::size_t i = 1; i + 1 < n; ++i) visit(i);
  if (c.closed && !is_break[0])
    visit(0);
  else if (c.closed && is_break[0]) {
    // seam corner counted once
    std::size_t i = 0;
    planar_point din = incoming(i), dout = outgoing(i);
    corner corn;
    corn.vertex = 0;
    corn.delta = turn_angle(din, dout);
    if (std::fabs(std::fabs(corn.delta) - kPi) < 1e-9) corn.cusp = true;
    report.corners.push_back(corn);
  }
  return report;
}

turning_report gauss_bonnet_audit(const polyline& c,
                                  const std::vector<std::size_t>& smooth_breaks) {
  require(c.closed, errc::not_closed, "Gauss-Bonnet audit needs a closed curve");
  for (const intersection& x : self_intersections(c))
    if (!x.degenerate) fail(errc::not_simple, "curve self-intersects");
  require(shoelace_area(c) > 0.0, errc::not_positively_oriented,
          "audit requires positive orientation");

  curvature_report curv = signed_curvature(c, smooth_breaks);
  turning_report out;
  stable_sum smooth, corners, total;
  std::size_t n = c.size();
  for (std::size_t i = 0; i < n - 1; ++i) {
    if (std::isnan(curv.kappa[i])) continue;
    double din = c.cum_arclength[i == 0 ? n - 1 : i] - c.cum_arclength[i == 0 ? n - 2 : i - 1];
    double dout = c.cum_arclength[i + 1] - c.cum_arclength[i];
    double angle = curv.kappa[i] * 0.5 * (din + dout);
    smooth += angle;
    total += std::fabs(angle);
  }
  for (const corner& corn : curv.corners) {
    corners += corn.delta;
    total += std::fabs(corn.delta);
    if (corn.cusp) out.cusp_count++;
  }
  out.smooth_turning = smooth.value();
  out.corner_sum = corners.value();
  out.total_abs_turning = total.value();
  return out;
}

// ---------------------------------------------------------------------------
// Self-intersections via a uniform spatial hash of segments.
// ---------------------------------------------------------------------------

namespace {

struct cell_key {
  int x, y;
  bool operator<(const cell_key& o) const { return x < o.x || (x == o.x && y < o.y); }
};

constexpr double kDegenerateTol = 1e-12;

double segment_pair_distance(planar_point a, planar_point b, planar_point c,
                             planar_point d) {
  auto pt_seg = [](planar_point p, planar_point s0, planar_point s1) {
    planar_point dd = s1 - s0;
    double len2 = dot(dd, dd);
    double u = len2 > 0.0 ? std::clamp(dot(p - s0, dd) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (s0 + u * dd));
  };
  return std::min(std::min(pt_seg(a, c, d), pt_seg(b, c, d)),
                  std::min(pt_seg(c, a, b), pt_seg(d, a, b)));
}

}  // namespace

std::vector<intersection> self_intersections(const polyline& c) {
  std::vector<intersection> out;
  std::size_t nseg = c.segment_count();
  if (nseg < 2) return out;

  double x0 = c.vertices[0].x1, x1 = x0, y0 = c.vertices[0].x2, y1 = y0;
  double mean_len = c.length() / static_cast<double>(nseg);
  for (const planar_point& v : c.vertices) {
    x0 = std::min(x0, v.x1);
    x1 = std::max(x1, v.x1);
    y0 = std::min(y0, v.x2);
    y1 = std::max(y1, v.x2);
  }
  double extent = std::max({x1 - x0, y1 - y0, 1e-300});
  double cell = std::max(mean_len, extent / 1024.0);

  std::map<cell_key, std::vector<std::size_t>> hash;
  auto key_of = [&](double x, double y) {
    return cell_key{static_cast<int>(std::floor((x - x0) / cell)),
                    static_cast<int>(std::floor((y - y0) / cell))};
  };
  for (std::size_t i = 0; i < nseg; ++i) {
    planar_point a = c.vertices[i], b = c.vertices[i + 1];
    cell_key ka = key_of(std::min(a.x1, b.x1), std::min(a.x2, b.x2));
    cell_key kb = key_of(std::max(a.x1, b.x1), std::max(a.x2, b.x2));
    for (int gx = ka.x; gx <= kb.x; ++gx)
      for (int gy = ka.y; gy <= kb.y; ++gy) hash[{gx, gy}].push_back(i);
  }

  auto adjacent = [&](std::size_t i, std::size_t j) {
    if (j == i + 1) return true;
    if (c.closed && i == 0 && j == nseg - 1) return true;
    return false;
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [key, segs] : hash) {
    for (std::size_t a = 0; a < segs.size(); ++a)
      for (std::size_t b = a + 1; b < segs.size(); ++b) {
        std::size_t i = std::min(segs[a], segs[b]);
        std::size_t j = std::max(segs[a], segs[b]);
        if (!adjacent(i, j)) pairs.emplace_back(i, j);
      }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  for (auto [i, j] : pairs) {
    planar_point a = c.vertices[i], b = c.vertices[i + 1];
    planar_point p = c.vertices[j], q = c.vertices[j + 1];
    int o1 = orient2d(a, b, p);
    int o2 = orient2d(a, b, q);
    int o3 = orient2d(p, q, a);
    int o4 = orient2d(p, q, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) {
      planar_point d1 = b - a, d2 = q - p;
      double denom = cross(d1, d2);
      double u = cross(p - a, d2) / denom;
      double v = cross(p - a, d1) / denom;
      intersection x;
      x.s = c.cum_arclength[i] + u * (c.cum_arclength[i + 1] - c.cum_arclength[i]);
      x.t = c.cum_arclength[j] + v * (c.cum_arclength[j + 1] - c.cum_arclength[j]);
      x.point = a + u * d1;
      out.push_back(x);
    } else if (o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0 ||
               segment_pair_distance(a, b, p, q) <= kDegenerateTol) {
      if (segment_pair_distance(a, b, p, q) <= kDegenerateTol) {
        intersection x;
        x.degenerate = true;
        x.s = c.cum_arclength[i];
        x.t = c.cum_arclength[j];
        x.point = a;
        out.push_back(x);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const intersection& l, const intersection& r) { return l.t < r.t; });
  return out;
}

std::optional<loop_interval> first_loop(const polyline& c, double from) {
  for (const intersection& x : self_intersections(c)) {
    if (x.degenerate) continue;
    if (x.s < from) continue;
    return loop_interval{x.s, x.t};  // sorted by t: first hit closes the first loop
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reflection across the Martinet boundary.
// ---------------------------------------------------------------------------

namespace {

// Boundary graph x1 = g(x2): the vertical ray for x2 <= 0, the branch
// x2^{m/2} for x2 >= 0. g is convex and C^2 for m >= 5.
double boundary_g(const structure_params& sp, double u) {
  return u <= 0.0 ? 0.0 : sp.half_power(u);
}

double boundary_g1(const structure_params& sp, double u) {
  if (u <= 0.0) return 0.0;
  return sp.mbar * std::sqrt(pow_int(u, static_cast<unsigned>(sp.m - 2)));
}

double boundary_g2(const structure_params& sp, double u) {
  if (u <= 0.0) return 0.0;
  return sp.mbar * (sp.mbar - 1.0) * std::sqrt(pow_int(u, static_cast<unsigned>(sp.m - 4)));
}

}  // namespace

planar_point project_to_martinet_boundary(const structure_params& sp, planar_point x) {
  auto dist2 = [&](double u) {
    double dx = x.x1 - boundary_g(sp, u);
    double dy = x.x2 - u;
    return dx * dx + dy * dy;
  };
  // Any boundary point gives a radius bound; the minimizer lies within it.
  double d0 = std::sqrt(dist2(std::min(x.x2, 0.0)));
  double lo = x.x2 - 1.25 * d0 - 1e-18;
  double hi = x.x2 + 1.25 * d0 + 1e-18;

  // Golden-section bracketing (distance to a convex boundary is unimodal).
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
  double f1 = dist2(c1), f2 = dist2(c2);
  for (int it = 0; it < 160 && (b - a) > 1e-17 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - phi * (b - a);
      f1 = dist2(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + phi * (b - a);
      f2 = dist2(c2);
    }
  }
  double u = 0.5 * (a + b);

  // Newton polish on the stationarity residual, safeguarded inside [lo, hi].
  for (int it = 0; it < 60; ++it) {
    double g = boundary_g(sp, u), g1 = boundary_g1(sp, u), g2 = boundary_g2(sp, u);
    double r = (x.x1 - g) * g1 + (x.x2 - u);
    double dr = -g1 * g1 + (x.x1 - g) * g2 - 1.0;
    if (dr == 0.0) break;
    double step = r / dr;
    double next = u - step;
    if (next < lo || next > hi) break;
    u = next;
    if (std::fabs(step) <= 1e-14 * std::max(1e-30, std::fabs(u))) break;
  }
  return {boundary_g(sp, u), u};
}

polyline reflect_across_martinet(const structure_params& sp, const polyline& c, double r) {
  require(r > 0.0 && r <= 1.0, errc::invalid_argument, "reflection ratio r in (0,1]");
  std::vector<planar_point> image;
  image.reserve(c.size());
  for (const planar_point& v : c.vertices) {
    double g = boundary_g(sp, v.x2);
    double inside_tol = 1e-12 * std::max(1.0, norm(v));
    if (v.x1 > g + inside_tol)
      fail(errc::wrong_side, "vertex lies strictly inside the reflected-over region");
    planar_point proj = v.x1 >= g ? planar_point{g, v.x2} : project_to_martinet_boundary(sp, v);
    image.push_back(v + (1.0 + r) * (proj - v));
  }
  return make_polyline(std::move(image), c.closed);
}

// ---------------------------------------------------------------------------
// Level sets of Q at fixed x2: nonnegative roots of 4 x^3 - 4 k x - level.
// ---------------------------------------------------------------------------

std::vector<double> level_set_q(const structure_params& sp, double level, double x2) {
  double k = x2 >= 0.0 ? pow_int(x2, static_cast<unsigned>(sp.m))
                       : -pow_int(-x2, static_cast<unsigned>(sp.m));
  // depressed cubic x^3 + p x + q = 0
  double p = -k;
  double q = -0.25 * level;

  std::vector<double> roots;
  double disc = 0.25 * q * q + p * p * p / 27.0;
  if (p == 0.0 && q == 0.0) {
    roots.push_back(0.0);
  } else if (disc > 0.0) {
    double s = std::sqrt(disc);
    double u = std::cbrt(-0.5 * q + s);
    double v = std::cbrt(-0.5 * q - s);
    roots.push_back(u + v);
  } else if (disc < 0.0) {
    double rad = std::sqrt(-p / 3.0);
    double arg = std::clamp(-0.5 * q / (rad * rad * rad), -1.0, 1.0);
    double phi = std::acos(arg);
    for (int j = 0; j < 3; ++j)
      roots.push_back(2.0 * rad * std::cos((phi + 2.0 * kPi * j) / 3.0));
  } else {
    // one simple and one double root
    roots.push_back(3.0 * q / p);
    roots.push_back(-1.5 * q / p);
    roots.push_back(-1.5 * q / p);
  }

  auto f = [&](double x) { return 4.0 * x * x * x - 4.0 * k * x - level; };
  auto fp = [&](double x) { return 12.0 * x * x - 4.0 * k; };
  std::vector<double> out;
  double zero_snap = 1e-30 + 1e-14 * std::fabs(x2);
  for (double root : roots) {
    for (int it = 0; it < 3; ++it) {
      double d = fp(root);
      if (std::fabs(d) < 1e-14 * std::max(1.0, std::fabs(root))) break;  // double root
      root -= f(root) / d;
    }
    if (std::fabs(root) <= zero_snap && std::fabs(level) == 0.0) root = 0.0;
    if (root >= 0.0) out.push_back(root);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mlab
