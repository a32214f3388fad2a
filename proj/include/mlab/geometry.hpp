#pragma once

#include <optional>
#include <vector>

#include "mlab/polyline.hpp"
#include "mlab/structure.hpp"

namespace mlab {

double length(const polyline& c);

/// Winding number of p with respect to the closed curve c, counterclockwise
/// positive (the counterclockwise unit circle winds +1 around the origin).
/// Crossing counts use exact-sign orientation predicates. Throws
/// PointOnCurve if p lies within `tolerance` of the support.
int winding_number(const polyline& c, planar_point p, double tolerance = 1e-12);

enum class area_method { line, grid };

struct weighted_area_report {
  double value = 0.0;
  area_method method = area_method::line;
  std::optional<int> grid_resolution;
  double estimated_error = 0.0;
  double sup_abs_q = 0.0;  // over the enclosed classes, sampled on the grid (grid method)
};

/// Weighted area of a closed curve: sum over winding classes k of
/// k * integral of Q. The line method evaluates the equivalent boundary
/// integral of P^2 dx2 exactly per segment; the grid method rasterizes
/// winding classes with cells straddling the support subdivided and,
/// ultimately, excluded into estimated_error.
weighted_area_report weighted_area(const structure_params& sp, const polyline& c,
                                   area_method method, int grid_resolution = 128);

struct isoperimetric_result {
  double lhs = 0.0;   // 4*pi*|A|
  double rhs = 0.0;   // sup|Q| * L^2
  bool holds = false;
};

isoperimetric_result isoperimetric_check(const structure_params& sp, const polyline& c,
                                         int grid_resolution = 128);

struct corner {
  std::size_t vertex = 0;
  double delta = 0.0;   // in [-pi, pi]; cusps resolved by the enclosed-side test
  bool cusp = false;
};

struct curvature_report {
  std::vector<double> kappa;     // one entry per interior vertex; NaN at breaks
  std::vector<corner> corners;   // turning at declared break indices
};

/// Discrete signed curvature at interior vertices (turning angle over the
/// average adjacent segment length). Breaks are reported as corners instead.
/// Requires near-uniform arclength spacing (error beyond 5% deviation).
curvature_report signed_curvature(const polyline& c,
                                  const std::vector<std::size_t>& smooth_breaks);

struct turning_report {
  double smooth_turning = 0.0;    // sum of integrated curvature over smooth pieces
  double corner_sum = 0.0;        // sum of corner discontinuities
  double total_abs_turning = 0.0; // integral of |dtheta|
  int cusp_count = 0;
  double residual() const;        // |smooth + corners - 2*pi|
};

/// Gauss-Bonnet audit of a simple, positively oriented closed curve:
/// smooth turning plus corner discontinuities must add to 2*pi.
turning_report gauss_bonnet_audit(const polyline& c,
                                  const std::vector<std::size_t>& smooth_breaks);

struct intersection {
  double s = 0.0;  // earlier arclength
  double t = 0.0;  // later arclength
  planar_point point;
  bool degenerate = false;  // tangential near-contact, not a transverse crossing
};

struct loop_interval {
  double s_minus = 0.0;
  double s_plus = 0.0;
};

/// All transverse self-intersections (s < t), found via a spatial hash of
/// segments. Tangential near-contacts within tolerance are flagged, not
/// counted as crossings.
std::vector<intersection> self_intersections(const polyline& c);

/// The loop closed by the self-intersection minimizing t; absent when the
/// curve is injective. `from` restricts the search to arclengths >= from.
std::optional<loop_interval> first_loop(const polyline& c, double from = 0.0);

/// Reflection across the Martinet boundary set: x maps to
/// x + (1+r)(proj(x) - x) with proj the projection onto the closed convex
/// region bounded by the vertical ray {0} x (-inf,0] and the curve
/// {P=0, x1>=0}. Vertices strictly inside that region are rejected.
polyline reflect_across_martinet(const structure_params& sp, const polyline& c, double r);

planar_point project_to_martinet_boundary(const structure_params& sp, planar_point x);

/// Nonnegative roots x1 of Q(x1, x2) = level, in increasing order; double
/// roots are reported twice. Closed-form cubic solve plus Newton polish.
std::vector<double> level_set_q(const structure_params& sp, double level, double x2);

}  // namespace mlab
