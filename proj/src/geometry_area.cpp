#include <algorithm>
#include <cmath>
#include <limits>

#include "mlab/geometry.hpp"
#include "mlab/predicates.hpp"
#include "mlab/quadrature.hpp"

namespace mlab {

double length(const polyline& c) { return c.length(); }

namespace {

double point_segment_distance(planar_point p, planar_point a, planar_point b) {
  planar_point d = b - a;
  double len2 = dot(d, d);
  double u = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  planar_point q = a + u * d;
  return norm(p - q);
}

// Sunday's crossing rule: upward edges count +1 when p is strictly left,
// downward edges -1 when strictly right. Exact-sign orientation makes the
// count stable for near-degenerate configurations.
int crossing_contribution(planar_point a, planar_point b, planar_point p) {
  if (a.x2 <= p.x2) {
    if (b.x2 > p.x2 && orient2d(a, b, p) > 0) return 1;
  } else {
    if (b.x2 <= p.x2 && orient2d(a, b, p) < 0) return -1;
  }
  return 0;
}

}  // namespace

int winding_number(const polyline& c, planar_point p, double tolerance) {
  require(c.closed, errc::not_closed, "winding number needs a closed curve");
  int wn = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (point_segment_distance(p, c.vertices[i], c.vertices[i + 1]) <= tolerance)
      fail(errc::point_on_curve, "query point lies on the curve support");
    wn += crossing_contribution(c.vertices[i], c.vertices[i + 1], p);
  }
  return wn;
}

namespace {

constexpr int kWindingCap = 64;

struct rect {
  double x0, y0, x1, y1;
  planar_point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Conservative: may report an intersection that is not there, never misses
// one. Assigned cells are therefore guaranteed single-class.
bool segment_touches_rect(planar_point a, planar_point b, const rect& r) {
  if (a.x1 < r.x0 && b.x1 < r.x0) return false;
  if (a.x1 > r.x1 && b.x1 > r.x1) return false;
  if (a.x2 < r.y0 && b.x2 < r.y0) return false;
  if (a.x2 > r.y1 && b.x2 > r.y1) return false;
  planar_point c0{r.x0, r.y0}, c1{r.x1, r.y0}, c2{r.x1, r.y1}, c3{r.x0, r.y1};
  int s0 = orient2d(a, b, c0);
  int s1 = orient2d(a, b, c1);
  int s2 = orient2d(a, b, c2);
  int s3 = orient2d(a, b, c3);
  if (s0 > 0 && s1 > 0 && s2 > 0 && s3 > 0) return false;
  if (s0 < 0 && s1 < 0 && s2 < 0 && s3 < 0) return false;
  return true;
}

struct grid_context {
  const structure_params* sp = nullptr;
  const polyline* curve = nullptr;
  rect box;
  int rows = 0;
  double row_height = 0.0;
  std::vector<std::vector<std::size_t>> row_segments;  // segment ids per base row

  stable_sum area_sum;
  stable_sum excluded_bound;
  double sup_abs_q = 0.0;
  int max_depth = 0;

  int row_of(double y) const {
    int r = static_cast<int>(std::floor((y - box.y0) / row_height));
    return std::clamp(r, 0, rows - 1);
  }

  int winding_at(planar_point p) const {
    int wn = 0;
    for (std::size_t idx : row_segments[row_of(p.x2)])
      wn += crossing_contribution(curve->vertices[idx], curve->vertices[idx + 1], p);
    if (std::abs(wn) > kWindingCap)
      fail(errc::winding_overflow, "winding number beyond the supported cap");
    return wn;
  }
};

double max_abs_q_on_corners(const structure_params& sp, const rect& r) {
  double q0 = std::fabs(eval_q(sp, {r.x0, r.y0}));
  double q1 = std::fabs(eval_q(sp, {r.x1, r.y0}));
  double q2 = std::fabs(eval_q(sp, {r.x1, r.y1}));
  double q3 = std::fabs(eval_q(sp, {r.x0, r.y1}));
  return std::max(std::max(q0, q1), std::max(q2, q3));
}

void eval_cell(grid_context& ctx, const rect& r, const std::vector<std::size_t>& candidates,
               int depth) {
  std::vector<std::size_t> inside;
  for (std::size_t idx : candidates)
    if (segment_touches_rect(ctx.curve->vertices[idx], ctx.curve->vertices[idx + 1], r))
      inside.push_back(idx);

  if (inside.empty()) {
    // No support in the closed cell: the whole cell lies in one winding class.
    planar_point c = r.center();
    int k = ctx.winding_at(c);
    if (k != 0) {
      double q = eval_q(*ctx.sp, c);
      ctx.area_sum += k * q * r.area();
      ctx.sup_abs_q = std::max(ctx.sup_abs_q, std::fabs(q));
    }
    return;
  }

  if (depth >= ctx.max_depth) {
    // Straddling cell at the finest level: excluded from every class, its
    // largest possible contribution is charged to the error estimate. A
    // straight path from the center crosses each strand at most once, so
    // |k| anywhere in the cell is bounded by |k(center)| + #strands.
    planar_point c = r.center();
    int k_center = kWindingCap;
    bool center_clear = true;
    for (std::size_t idx : inside)
      if (point_segment_distance(c, ctx.curve->vertices[idx],
                                 ctx.curve->vertices[idx + 1]) < 1e-14)
        center_clear = false;
    if (center_clear) k_center = std::abs(ctx.winding_at(c));
    double qbound = max_abs_q_on_corners(*ctx.sp, r);
    ctx.excluded_bound += (k_center + static_cast<double>(inside.size())) * qbound * r.area();
    ctx.sup_abs_q = std::max(ctx.sup_abs_q, qbound);
    return;
  }

  double xm = 0.5 * (r.x0 + r.x1), ym = 0.5 * (r.y0 + r.y1);
  eval_cell(ctx, {r.x0, r.y0, xm, ym}, inside, depth + 1);
  eval_cell(ctx, {xm, r.y0, r.x1, ym}, inside, depth + 1);
  eval_cell(ctx, {r.x0, ym, xm, r.y1}, inside, depth + 1);
  eval_cell(ctx, {xm, ym, r.x1, r.y1}, inside, depth + 1);
}

struct grid_run {
  double value = 0.0;
  double excluded_bound = 0.0;
  double sup_abs_q = 0.0;
};

grid_run run_grid(const structure_params& sp, const polyline& c, int resolution) {
  grid_context ctx;
  ctx.sp = &sp;
  ctx.curve = &c;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const planar_point& v : c.vertices) {
    x0 = std::min(x0, v.x1);
    x1 = std::max(x1, v.x1);
    y0 = std::min(y0, v.x2);
    y1 = std::max(y1, v.x2);
  }
  // Cells follow the bounding box aspect so thin curves keep resolution.
  double scale = std::max({x1 - x0, y1 - y0, 1e-30});
  double wx = std::max(x1 - x0, 1e-9 * scale);
  double wy = std::max(y1 - y0, 1e-9 * scale);
  double px = 1e-3 * wx, py = 1e-3 * wy;
  ctx.box = {x0 - px, y0 - py, x1 + px, y1 + py};
  ctx.rows = resolution;
  ctx.row_height = (ctx.box.y1 - ctx.box.y0) / resolution;
  ctx.max_depth = static_cast<int>(std::ceil(std::log2(static_cast<double>(resolution)))) + 1;

  ctx.row_segments.resize(resolution);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    double lo = std::min(c.vertices[i].x2, c.vertices[i + 1].x2);
    double hi = std::max(c.vertices[i].x2, c.vertices[i + 1].x2);
    int r0 = ctx.row_of(lo), r1 = ctx.row_of(hi);
    for (int r = r0; r <= r1; ++r) ctx.row_segments[r].push_back(i);
  }

  double cell = (ctx.box.x1 - ctx.box.x0) / resolution;
  for (int j = 0; j < resolution; ++j) {
    double ylo = ctx.box.y0 + j * ctx.row_height;
    const std::vector<std::size_t>& row = ctx.row_segments[j];
    for (int i = 0; i < resolution; ++i) {
      rect cellrect{ctx.box.x0 + i * cell, ylo, ctx.box.x0 + (i + 1) * cell,
                    ylo + ctx.row_height};
      eval_cell(ctx, cellrect, row, 0);
    }
  }

  grid_run out;
  out.value = ctx.area_sum.value();
  out.excluded_bound = ctx.excluded_bound.value();
  out.sup_abs_q = ctx.sup_abs_q;
  return out;
}

double line_weighted_area(const structure_params& sp, const polyline& c) {
  // P^2 is a degree-2m polynomial along each straight segment; m+2 Gauss
  // nodes integrate it exactly.
  const int nodes = sp.m + 2;
  stable_sum acc;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    planar_point a = c.vertices[i], b = c.vertices[i + 1];
    double dx2 = b.x2 - a.x2;
    if (dx2 == 0.0) continue;
    double seg = gl_integrate(
        [&](double u) {
          planar_point q{a.x1 + u * (b.x1 - a.x1), a.x2 + u * (b.x2 - a.x2)};
          double p = eval_p(sp, q);
          return p * p;
        },
        0.0, 1.0, nodes);
    acc += seg * dx2;
  }
  return acc.value();
}

}  // namespace

weighted_area_report weighted_area(const structure_params& sp, const polyline& c,
                                   area_method method, int grid_resolution) {
  require(c.closed, errc::unclosed_curve, "weighted area needs a closed curve");
  weighted_area_report report;
  report.method = method;
  if (method == area_method::line) {
    report.value = line_weighted_area(sp, c);
    report.estimated_error = 0.0;
    return report;
  }
  require(grid_resolution >= 32, errc::resolution_too_coarse,
          "need at least 32 cells across the bounding box");
  report.grid_resolution = grid_resolution;
  grid_run coarse = run_grid(sp, c, grid_resolution);
  grid_run fine = run_grid(sp, c, 2 * grid_resolution);
  report.value = (4.0 * fine.value - coarse.value) / 3.0;
  report.estimated_error = std::fabs(fine.value - coarse.value) + fine.excluded_bound;
  report.sup_abs_q = std::max(coarse.sup_abs_q, fine.sup_abs_q);
  return report;
}

isoperimetric_result isoperimetric_check(const structure_params& sp, const polyline& c,
                                         int grid_resolution) {
  weighted_area_report area = weighted_area(sp, c, area_method::grid, grid_resolution);
  isoperimetric_result out;
  out.lhs = 4.0 * M_PI * std::fabs(area.value);
  double len = c.length();
  out.rhs = area.sup_abs_q * len * len;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-6) + 4.0 * M_PI * area.estimated_error;
  return out;
}

}  // namespace mlab
