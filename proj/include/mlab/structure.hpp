#pragma once

#include <vector>

#include "mlab/error.hpp"
#include "mlab/scalar.hpp"

namespace mlab {

struct planar_point {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct space_point {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

inline planar_point operator+(planar_point a, planar_point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline planar_point operator-(planar_point a, planar_point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline planar_point operator*(double s, planar_point p) { return {s * p.x1, s * p.x2}; }
inline double dot(planar_point a, planar_point b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(planar_point a, planar_point b) { return a.x1 * b.x2 - a.x2 * b.x1; }
double norm(planar_point p);

/// The pair (m, epsilon) plus the numeric backend selector. Fixes the scalar
/// fields P, Q and the candidate curve; every other module consumes it.
struct structure_params {
  int m = 5;               // odd, >= 5
  double epsilon = 0.1;    // in (0, 0.5]
  double mbar = 2.5;       // m/2, exact half-integer
  precision prec = precision::standard;

  structure_params() = default;
  structure_params(int m_, double epsilon_, precision prec_ = precision::standard);

  planar_point a0() const { return {0.0, 0.0}; }
  planar_point a_eps() const;

  /// t^{m/2} computed as sqrt(t^m); exact at dyadic t, monotone near 0.
  double half_power(double t) const;
};

struct signed_value {
  double value = 0.0;
  bool uncertain = false;  // sign not trusted: |value| within 4 ulps of cancellation
};

double eval_p(const structure_params& sp, planar_point p);
double eval_q(const structure_params& sp, planar_point p);
signed_value eval_p_checked(const structure_params& sp, planar_point p);
planar_point grad_q(const structure_params& sp, planar_point p);

/// gamma_bar(t) = (t^{m/2}, t, 0); rejects t < 0.
space_point candidate_gamma_bar(const structure_params& sp, double t);

struct polyline;  // geometry module

/// 3D lift: x3(t) = x3_start + integral of P^2 dx2 along the curve. The
/// integrand is polynomial on each straight segment and is integrated
/// exactly (Gauss-Legendre), accumulated with compensated summation.
std::vector<space_point> horizontal_lift(const structure_params& sp, const polyline& curve,
                                         double x3_start);

}  // namespace mlab
