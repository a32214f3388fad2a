#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlab/structure.hpp"

namespace mlab {

/// Sampled planar curve with cumulative arclength; the universal curve
/// carrier. Invariants: consecutive vertices distinct, cum_arclength strictly
/// increasing from 0 to the total length, closed curves repeat the first
/// vertex bit-exactly at the end.
struct polyline {
  std::vector<planar_point> vertices;
  std::vector<double> cum_arclength;
  bool closed = false;

  std::size_t size() const { return vertices.size(); }
  double length() const { return cum_arclength.empty() ? 0.0 : cum_arclength.back(); }
  std::size_t segment_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }

  /// Point at arclength s (clamped to [0, length]).
  planar_point at(double s) const;
};

/// Builds a polyline, computing arclength with compensated summation.
/// Throws invalid_argument on < 2 vertices or coincident neighbors; if
/// `closed`, first and last vertices must coincide bit-exactly.
polyline make_polyline(std::vector<planar_point> vertices, bool closed);

/// Appends the first vertex if needed, then builds a closed polyline.
polyline make_closed_polyline(std::vector<planar_point> vertices);

polyline reverse(const polyline& c);
polyline concatenate(const polyline& a, const polyline& b, bool closed = false);

double polyline_length(const polyline& c);

// CSV (columns s,x1,x2) and binary frame (magic "MLAB", version u16,
// count u64, little-endian f64 triples).
void write_csv(const polyline& c, const std::string& path);
polyline read_csv(const std::string& path);
void write_frame(const polyline& c, const std::string& path);
polyline read_frame(const std::string& path);

}  // namespace mlab
