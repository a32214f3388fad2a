#include "mlab/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mlab/error.hpp"

namespace mlab {

planar_point polyline::at(double s) const {
  if (vertices.empty()) return {};
  if (s <= 0.0) return vertices.front();
  if (s >= length()) return vertices.back();
  auto it = std::upper_bound(cum_arclength.begin(), cum_arclength.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cum_arclength.begin()) - 1;
  double seg = cum_arclength[i + 1] - cum_arclength[i];
  double u = (s - cum_arclength[i]) / seg;
  planar_point a = vertices[i], b = vertices[i + 1];
  return {a.x1 + u * (b.x1 - a.x1), a.x2 + u * (b.x2 - a.x2)};
}

polyline make_polyline(std::vector<planar_point> vertices, bool closed) {
  require(vertices.size() >= 2, errc::invalid_argument, "polyline needs >= 2 vertices");
  if (closed) {
    require(vertices.front().x1 == vertices.back().x1 &&
                vertices.front().x2 == vertices.back().x2,
            errc::not_closed, "closed polyline must repeat its first vertex bit-exactly");
  }
  polyline c;
  c.closed = closed;
  c.cum_arclength.resize(vertices.size());
  c.cum_arclength[0] = 0.0;
  stable_sum acc;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    double seg = std::hypot(vertices[i + 1].x1 - vertices[i].x1,
                            vertices[i + 1].x2 - vertices[i].x2);
    require(seg > 0.0, errc::invalid_argument, "consecutive vertices must be distinct");
    acc += seg;
    c.cum_arclength[i + 1] = acc.value();
  }
  c.vertices = std::move(vertices);
  return c;
}

polyline make_closed_polyline(std::vector<planar_point> vertices) {
  require(!vertices.empty(), errc::invalid_argument, "empty vertex list");
  if (vertices.front().x1 != vertices.back().x1 ||
      vertices.front().x2 != vertices.back().x2)
    vertices.push_back(vertices.front());
  return make_polyline(std::move(vertices), true);
}

polyline reverse(const polyline& c) {
  std::vector<planar_point> v(c.vertices.rbegin(), c.vertices.rend());
  return make_polyline(std::move(v), c.closed);
}

polyline concatenate(const polyline& a, const polyline& b, bool closed) {
  std::vector<planar_point> v = a.vertices;
  std::size_t start = 0;
  if (!b.vertices.empty() && v.back().x1 == b.vertices.front().x1 &&
      v.back().x2 == b.vertices.front().x2)
    start = 1;
  v.insert(v.end(), b.vertices.begin() + start, b.vertices.end());
  return make_polyline(std::move(v), closed);
}

double polyline_length(const polyline& c) { return c.length(); }

void write_csv(const polyline& c, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open " + path);
  out << "s,x1,x2\n";
  out.precision(17);
  for (std::size_t i = 0; i < c.size(); ++i)
    out << c.cum_arclength[i] << ',' << c.vertices[i].x1 << ',' << c.vertices[i].x2
        << '\n';
  require(out.good(), errc::io_failure, "write failed: " + path);
}

polyline read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_failure, "cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<planar_point> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double s, x1, x2;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &s, &x1, &x2) != 3)
      fail(errc::io_failure, "malformed csv row in " + path);
    pts.push_back({x1, x2});
  }
  bool closed = pts.size() >= 3 && pts.front().x1 == pts.back().x1 &&
                pts.front().x2 == pts.back().x2;
  return make_polyline(std::move(pts), closed);
}

namespace {

constexpr char kFrameMagic[4] = {'M', 'L', 'A', 'B'};
constexpr std::uint16_t kFrameVersion = 1;

template <class T>
void put(std::ofstream& out, T v) {
  // little-endian host assumed; the format is declared little-endian
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void write_frame(const polyline& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_failure, "cannot open " + path);
  out.write(kFrameMagic, 4);
  put<std::uint16_t>(out, kFrameVersion);
  put<std::uint64_t>(out, c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    put<double>(out, c.cum_arclength[i]);
    put<double>(out, c.vertices[i].x1);
    put<double>(out, c.vertices[i].x2);
  }
  require(out.good(), errc::io_failure, "write failed: " + path);
}

polyline read_frame(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_failure, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, kFrameMagic, 4) == 0, errc::io_failure,
          "bad frame magic in " + path);
  std::uint16_t version = get<std::uint16_t>(in);
  require(version == kFrameVersion, errc::io_failure, "unsupported frame version");
  std::uint64_t count = get<std::uint64_t>(in);
  std::vector<planar_point> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    (void)get<double>(in);  // s is recomputed
    double x1 = get<double>(in);
    double x2 = get<double>(in);
    pts.push_back({x1, x2});
  }
  require(in.good(), errc::io_failure, "truncated frame " + path);
  bool closed = pts.size() >= 3 && pts.front().x1 == pts.back().x1 &&
                pts.front().x2 == pts.back().x2;
  return make_polyline(std::move(pts), closed);
}

const char* errc_name(errc code) {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::point_on_curve: return "PointOnCurve";
    case errc::unclosed_curve: return "UnclosedCurve";
    case errc::resolution_too_coarse: return "ResolutionTooCoarse";
    case errc::winding_overflow: return "WindingOverflow";
    case errc::non_uniform_parametrization: return "NonUniformParametrization";
    case errc::not_simple: return "NotSimple";
    case errc::not_closed: return "NotClosed";
    case errc::not_positively_oriented: return "NotPositivelyOriented";
    case errc::wrong_side: return "WrongSide";
    case errc::step_underflow: return "StepUnderflow";
    case errc::step_limit: return "StepLimit";
    case errc::unresolved_zero: return "UnresolvedZero";
    case errc::bracket_failure: return "BracketFailure";
    case errc::regime_violation: return "RegimeViolation";
    case errc::input_not_sorted: return "InputNotSorted";
    case errc::noise_floor: return "NoiseFloor";
    case errc::io_failure: return "IoFailure";
    case errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace mlab
