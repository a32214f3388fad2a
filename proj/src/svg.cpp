#include "mlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mlab/error.hpp"

namespace mlab {

namespace {

struct view_map {
  double x_off, y_off, scale;
  double height;
  double magnify;

  double px(double x1) const { return x_off + (x1 * magnify) * scale; }
  double py(double x2) const { return height - (y_off + x2 * scale); }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void plot_scene(const std::vector<plot_curve>& curves,
                const std::vector<plot_marker>& markers, const scene_annotations& ann,
                const std::string& path) {
  require(!curves.empty(), errc::invalid_argument, "plot needs at least one curve");

  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  auto widen = [&](double x1, double x2) {
    double xm = x1 * ann.x_magnify;
    if (first) {
      x_lo = x_hi = xm;
      y_lo = y_hi = x2;
      first = false;
    } else {
      x_lo = std::min(x_lo, xm);
      x_hi = std::max(x_hi, xm);
      y_lo = std::min(y_lo, x2);
      y_hi = std::max(y_hi, x2);
    }
  };
  for (const plot_curve& pc : curves)
    for (const planar_point& v : pc.curve.vertices) widen(v.x1, v.x2);
  for (const plot_marker& mk : markers) widen(mk.at.x1, mk.at.x2);

  const double width = 760.0, height = 560.0, margin = 60.0;
  double span_x = std::max(x_hi - x_lo, 1e-30);
  double span_y = std::max(y_hi - y_lo, 1e-30);
  double scale = std::min((width - 2 * margin) / span_x, (height - 2 * margin) / span_y);

  view_map vm;
  vm.magnify = ann.x_magnify;
  vm.scale = scale;
  vm.x_off = margin - x_lo * scale;
  vm.y_off = margin - y_lo * scale;
  vm.height = height;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes through the origin of the data frame
  double ox = vm.px(0.0), oy = vm.py(0.0);
  svg << "<line x1=\"" << ox << "\" y1=\"" << (height - 10.0) << "\" x2=\"" << ox
      << "\" y2=\"10\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
  svg << "<line x1=\"10\" y1=\"" << oy << "\" x2=\"" << (width - 10.0) << "\" y2=\"" << oy
      << "\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
  svg << "<text x=\"" << (ox + 4) << "\" y=\"16\" font-size=\"12\">x2</text>\n";
  svg << "<text x=\"" << (width - 28) << "\" y=\"" << (oy - 6) << "\" font-size=\"12\">x1</text>\n";

  auto tick_x = [&](double value, const std::string& label) {
    double x = vm.px(value);
    svg << "<line x1=\"" << x << "\" y1=\"" << (oy - 4) << "\" x2=\"" << x << "\" y2=\""
        << (oy + 4) << "\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
    svg << "<text x=\"" << (x - 10) << "\" y=\"" << (oy + 18) << "\" font-size=\"11\">" << label
        << "</text>\n";
  };
  auto tick_y = [&](double value, const std::string& label) {
    double y = vm.py(value);
    svg << "<line x1=\"" << (ox - 4) << "\" y1=\"" << y << "\" x2=\"" << (ox + 4) << "\" y2=\""
        << y << "\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
    svg << "<text x=\"" << (ox - 44) << "\" y=\"" << (y + 4) << "\" font-size=\"11\">" << label
        << "</text>\n";
  };
  double eps_mbar = std::sqrt(std::pow(ann.epsilon, 2.0 * ann.mbar));
  tick_x(eps_mbar, "eps^(m/2)");
  tick_y(ann.epsilon, "eps");
  if (ann.beta && *ann.beta > 0.0) tick_x(std::sqrt(*ann.beta), "beta^(1/2)");
  if (ann.rho && *ann.rho > 0.0) tick_x(std::sqrt(*ann.rho), "rho^(1/2)");

  for (const plot_curve& pc : curves) {
    svg << "<path d=\"";
    for (std::size_t i = 0; i < pc.curve.size(); ++i) {
      const planar_point& v = pc.curve.vertices[i];
      svg << (i == 0 ? 'M' : 'L') << fmt(vm.px(v.x1)) << ' ' << fmt(vm.py(v.x2));
    }
    svg << "\" fill=\"none\" stroke=\"" << pc.color << "\" stroke-width=\"" << pc.width
        << "\"";
    if (pc.dashed) svg << " stroke-dasharray=\"5,4\"";
    svg << "/>\n";
  }

  for (const plot_marker& mk : markers) {
    svg << "<circle cx=\"" << fmt(vm.px(mk.at.x1)) << "\" cy=\"" << fmt(vm.py(mk.at.x2))
        << "\" r=\"3\" fill=\"" << mk.color << "\"/>\n";
    if (!mk.label.empty())
      svg << "<text x=\"" << fmt(vm.px(mk.at.x1) + 5) << "\" y=\"" << fmt(vm.py(mk.at.x2) - 5)
          << "\" font-size=\"11\">" << mk.label << "</text>\n";
  }

  // legend: curve labels plus the declared axis scaling
  double ly = 24.0;
  for (const plot_curve& pc : curves) {
    if (pc.label.empty()) continue;
    svg << "<line x1=\"" << (width - 190) << "\" y1=\"" << (ly - 4) << "\" x2=\""
        << (width - 166) << "\" y2=\"" << (ly - 4) << "\" stroke=\"" << pc.color
        << "\" stroke-width=\"" << pc.width << "\"";
    if (pc.dashed) svg << " stroke-dasharray=\"5,4\"";
    svg << "/>\n";
    svg << "<text x=\"" << (width - 160) << "\" y=\"" << ly << "\" font-size=\"12\">"
        << pc.label << "</text>\n";
    ly += 18.0;
  }
  svg << "<text x=\"" << (width - 190) << "\" y=\"" << ly
      << "\" font-size=\"11\" fill=\"#666\">x1 axis magnified by " << fmt(ann.x_magnify)
      << "</text>\n";
  svg << "</svg>\n";

  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open " + path);
  out << svg.str();
  require(out.good(), errc::io_failure, "write failed: " + path);
}

}  // namespace mlab
