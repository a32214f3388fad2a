#include "mlab/structure.hpp"

#include <cmath>

#include "mlab/polyline.hpp"
#include "mlab/quadrature.hpp"

namespace mlab {

double norm(planar_point p) { return std::hypot(p.x1, p.x2); }

structure_params::structure_params(int m_, double epsilon_, precision prec_)
    : m(m_), epsilon(epsilon_), mbar(0.5 * m_), prec(prec_) {
  require(m >= 5 && (m % 2) == 1, errc::config_error, "m must be an odd integer >= 5");
  require(epsilon > 0.0 && epsilon <= 0.5, errc::config_error,
          "epsilon must lie in (0, 0.5]");
}

double structure_params::half_power(double t) const {
  require(t >= 0.0, errc::invalid_argument, "fractional power of negative t");
  return std::sqrt(pow_int(t, static_cast<unsigned>(m)));
}

planar_point structure_params::a_eps() const { return {half_power(epsilon), epsilon}; }

namespace {

template <class Real>
Real p_kernel(int m, Real x1, Real x2) {
  return x1 * x1 - pow_int(x2, static_cast<unsigned>(m));
}

}  // namespace

double eval_p(const structure_params& sp, planar_point p) {
  if (sp.prec == precision::extended)
    return to_double(p_kernel<dd>(sp.m, dd(p.x1), dd(p.x2)));
  return p_kernel<double>(sp.m, p.x1, p.x2);
}

signed_value eval_p_checked(const structure_params& sp, planar_point p) {
  signed_value out;
  if (sp.prec == precision::extended) {
    dd a = dd::from_prod(p.x1, p.x1);
    dd b = pow_int(dd(p.x2), static_cast<unsigned>(sp.m));
    dd diff = a - b;
    out.value = to_double(diff);
    double big = std::max(std::fabs(to_double(a)), std::fabs(to_double(b)));
    const double dd_eps = 4.93e-32;  // 2^-104
    out.uncertain = std::fabs(out.value) <= 4.0 * dd_eps * big;
  } else {
    double a = p.x1 * p.x1;
    double b = pow_int(p.x2, static_cast<unsigned>(sp.m));
    out.value = a - b;
    double big = std::max(std::fabs(a), std::fabs(b));
    out.uncertain =
        std::fabs(out.value) <= 4.0 * std::numeric_limits<double>::epsilon() * big;
  }
  return out;
}

double eval_q(const structure_params& sp, planar_point p) {
  return 4.0 * p.x1 * eval_p(sp, p);
}

planar_point grad_q(const structure_params& sp, planar_point p) {
  unsigned m = static_cast<unsigned>(sp.m);
  double x2m = pow_int(p.x2, m);
  double x2m1 = pow_int(p.x2, m - 1);
  return {4.0 * (3.0 * p.x1 * p.x1 - x2m), -4.0 * sp.m * p.x1 * x2m1};
}

space_point candidate_gamma_bar(const structure_params& sp, double t) {
  return {sp.half_power(t), t, 0.0};
}

std::vector<space_point> horizontal_lift(const structure_params& sp, const polyline& curve,
                                         double x3_start) {
  require(curve.size() >= 2, errc::invalid_argument, "lift needs >= 2 vertices");
  std::vector<space_point> out;
  out.reserve(curve.size());
  out.push_back({curve.vertices[0].x1, curve.vertices[0].x2, x3_start});
  stable_sum x3(x3_start);
  // P^2 restricted to a segment is a polynomial of degree 2m in the segment
  // parameter; m+2 Gauss points integrate it exactly.
  const int nodes = sp.m + 2;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    planar_point a = curve.vertices[i];
    planar_point b = curve.vertices[i + 1];
    double dx2 = b.x2 - a.x2;
    if (dx2 != 0.0) {
      double seg = gl_integrate(
          [&](double u) {
            planar_point q{a.x1 + u * (b.x1 - a.x1), a.x2 + u * (b.x2 - a.x2)};
            double p = eval_p(sp, q);
            return p * p;
          },
          0.0, 1.0, nodes);
      x3 += seg * dx2;
    }
    out.push_back({b.x1, b.x2, x3.value()});
  }
  return out;
}

}  // namespace mlab
