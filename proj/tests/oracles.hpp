// Test-side oracles, deliberately independent of the library's numerics:
// adaptive Simpson quadrature, ray-crossing winding counts, all-pairs
// intersection search, dense-sampling projections, and curve generators.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mlab/polyline.hpp"
#include "mlab/structure.hpp"

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson; independent of the library's Gauss-Kronrod code.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol * std::max(1.0, std::fabs(whole)), 48);
}

/// Winding number by plain ray crossings with jittered ray height (no exact
/// predicates; retries on suspicious proximity).
inline int winding_by_rays(const mlab::polyline& c, mlab::planar_point p) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    double y = p.x2 + attempt * 1.2345e-9;
    int wn = 0;
    bool suspicious = false;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      double y1 = c.vertices[i].x2, y2 = c.vertices[i + 1].x2;
      if ((y1 <= y) == (y2 <= y)) continue;
      double t = (y - y1) / (y2 - y1);
      double x = c.vertices[i].x1 + t * (c.vertices[i + 1].x1 - c.vertices[i].x1);
      if (std::fabs(x - p.x1) < 1e-12) suspicious = true;
      if (x > p.x1) wn += (y2 > y1) ? 1 : -1;
    }
    if (!suspicious) return wn;
  }
  return 0;
}

struct crossing {
  double s = 0.0;
  double t = 0.0;
};

/// All-pairs transverse intersection search, O(n^2).
inline std::vector<crossing> all_pairs_intersections(const mlab::polyline& c) {
  std::vector<crossing> out;
  std::size_t nseg = c.segment_count();
  for (std::size_t i = 0; i < nseg; ++i) {
    for (std::size_t j = i + 2; j < nseg; ++j) {
      if (c.closed && i == 0 && j == nseg - 1) continue;
      mlab::planar_point a = c.vertices[i], b = c.vertices[i + 1];
      mlab::planar_point p = c.vertices[j], q = c.vertices[j + 1];
      mlab::planar_point d1 = b - a, d2 = q - p;
      double denom = cross(d1, d2);
      if (denom == 0.0) continue;
      double u = cross(p - a, d2) / denom;
      double v = cross(p - a, d1) / denom;
      if (u <= 0.0 || u >= 1.0 || v <= 0.0 || v >= 1.0) continue;
      crossing x;
      x.s = c.cum_arclength[i] + u * (c.cum_arclength[i + 1] - c.cum_arclength[i]);
      x.t = c.cum_arclength[j] + v * (c.cum_arclength[j + 1] - c.cum_arclength[j]);
      out.push_back(x);
    }
  }
  return out;
}

/// Nearest point on the Martinet boundary by dense sampling plus local
/// refinement; independent of the library's golden-section/Newton path.
inline mlab::planar_point dense_projection(const mlab::structure_params& sp,
                                           mlab::planar_point x) {
  auto boundary = [&](double u) -> mlab::planar_point {
    return {u <= 0.0 ? 0.0 : sp.half_power(u), u};
  };
  double d0 = std::hypot(x.x1, x.x2 - std::min(x.x2, 0.0)) + 1e-12;
  double lo = x.x2 - 1.5 * d0, hi = x.x2 + 1.5 * d0;
  double best_u = lo;
  double best = 1e300;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    double u = lo + (hi - lo) * i / n;
    mlab::planar_point b = boundary(u);
    double d = (x.x1 - b.x1) * (x.x1 - b.x1) + (x.x2 - b.x2) * (x.x2 - b.x2);
    if (d < best) {
      best = d;
      best_u = u;
    }
  }
  double a = best_u - (hi - lo) / n, b = best_u + (hi - lo) / n;
  for (int it = 0; it < 200; ++it) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    auto d2 = [&](double u) {
      mlab::planar_point q = boundary(u);
      return (x.x1 - q.x1) * (x.x1 - q.x1) + (x.x2 - q.x2) * (x.x2 - q.x2);
    };
    if (d2(m1) < d2(m2))
      b = m2;
    else
      a = m1;
  }
  return boundary(0.5 * (a + b));
}

// ---------------------------------------------------------------------------
// Deterministic random curve generators.
// ---------------------------------------------------------------------------

class rng {
 public:
  explicit rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
  }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

/// Smooth random closed curve from a low-order Fourier radius, shifted into
/// the half-plane x1 >= margin.
inline mlab::polyline random_closed_curve(rng& r, int n_vertices, double margin = 0.05) {
  int modes = 2 + static_cast<int>(r.raw() % 3);
  std::vector<double> amp(modes), phase(modes);
  for (int k = 0; k < modes; ++k) {
    amp[k] = r.uniform(0.02, 0.12) / (k + 1);
    phase[k] = r.uniform(0.0, 2.0 * M_PI);
  }
  double base = r.uniform(0.25, 0.6);
  double cx = r.uniform(base + margin, base + margin + 0.8);
  double cy = r.uniform(-0.4, 0.4);
  std::vector<mlab::planar_point> pts;
  pts.reserve(n_vertices + 1);
  for (int i = 0; i < n_vertices; ++i) {
    double a = 2.0 * M_PI * i / n_vertices;
    double rad = base;
    for (int k = 0; k < modes; ++k) rad += amp[k] * std::cos((k + 2) * a + phase[k]);
    pts.push_back({cx + rad * std::cos(a), cy + rad * std::sin(a)});
  }
  pts.push_back(pts.front());
  return mlab::make_polyline(std::move(pts), true);
}

/// Smooth open curve from a random heading walk (unit speed, bounded turn).
inline mlab::polyline random_open_curve(rng& r, int n_vertices) {
  double theta = r.uniform(0.0, 2.0 * M_PI);
  double kappa = 0.0;
  double h = r.uniform(0.004, 0.012);
  mlab::planar_point p{r.uniform(0.2, 0.8), r.uniform(-0.3, 0.3)};
  std::vector<mlab::planar_point> pts{p};
  for (int i = 1; i < n_vertices; ++i) {
    kappa += r.uniform(-0.8, 0.8);
    kappa *= 0.98;
    theta += kappa * h;
    p.x1 += h * std::cos(theta);
    p.x2 += h * std::sin(theta);
    pts.push_back(p);
  }
  return mlab::make_polyline(std::move(pts), false);
}

inline mlab::polyline circle(mlab::planar_point center, double radius, int n,
                             bool clockwise = false) {
  std::vector<mlab::planar_point> pts;
  pts.reserve(n + 1);
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * M_PI * i / n * (clockwise ? -1.0 : 1.0);
    pts.push_back({center.x1 + radius * std::cos(a), center.x2 + radius * std::sin(a)});
  }
  pts.push_back(pts.front());
  return mlab::make_polyline(std::move(pts), true);
}

}  // namespace oracle
