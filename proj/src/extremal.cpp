#include "mlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

// State: x1, x2, theta, constraint, and the running total variation of the
// constraint (used only to scale its error weight).
template <class Real>
using state = std::array<Real, 5>;

template <class Real>
struct rhs_eval {
  const structure_params& sp;
  const extremal_params& ep;
  mutable int evals = 0;

  state<Real> operator()(const state<Real>& y) const {
    ++evals;
    Real x1 = y[0], x2 = y[1], th = y[2];
    Real p = x1 * x1 - pow_int(x2, static_cast<unsigned>(sp.m));
    Real c = cos_of(th), s = sin_of(th);
    Real theta_dot(0.0);
    if (ep.lambda.sign != 0) {
      // lambda*Q through the log domain; Q = 4*x1*P.
      double q = 4.0 * to_double(x1) * to_double(p);
      theta_dot = Real(ep.lambda.times(q));
    }
    Real dc = p * p * s;
    return {c, s, theta_dot, dc, fabs_of(dc)};
  }

  static Real fabs_of(Real v) { return v < Real(0.0) ? -v : v; }
};

template <class Real>
extremal_trajectory integrate_impl(const structure_params& sp, const extremal_params& ep,
                                   double tol, long max_steps) {
  extremal_trajectory traj;
  traj.params = ep;
  traj.stats.tol = tol;

  rhs_eval<Real> rhs{sp, ep};
  const double T = ep.T;
  state<Real> y{Real(0.0), Real(0.0), Real(ep.theta0), Real(0.0), Real(0.0)};
  state<Real> f0 = rhs(y);

  auto push_sample = [&](double s, const state<Real>& st, const state<Real>& f) {
    traj.samples.push_back({s,
                            {to_double(st[0]), to_double(st[1])},
                            to_double(st[2]),
                            to_double(st[3])});
    traj.derivatives.push_back(
        {to_double(f[0]), to_double(f[1]), to_double(f[2]), to_double(f[3])});
  };
  push_sample(0.0, y, f0);

  const double h_floor = 1e-3 * T * std::numeric_limits<double>::epsilon();
  double s = 0.0;
  double h = std::min(T, 1e-2 * T);
  traj.stats.min_step = T;

  while (s < T) {
    if (h < h_floor)
      fail(errc::step_underflow,
           "required step below the backend floor; retry with extended precision");
    if (traj.stats.accepted + traj.stats.rejected > max_steps)
      fail(errc::step_limit, "step budget exhausted");
    if (s + h > T) h = T - s;

    state<Real> k1 = f0;
    state<Real> yt;
    for (int i = 0; i < 5; ++i) yt[i] = y[i] + Real(h) * (Real(kA21) * k1[i]);
    state<Real> k2 = rhs(yt);
    for (int i = 0; i < 5; ++i)
      yt[i] = y[i] + Real(h) * (Real(kA31) * k1[i] + Real(kA32) * k2[i]);
    state<Real> k3 = rhs(yt);
    for (int i = 0; i < 5; ++i)
      yt[i] = y[i] + Real(h) * (Real(kA41) * k1[i] + Real(kA42) * k2[i] + Real(kA43) * k3[i]);
    state<Real> k4 = rhs(yt);
    for (int i = 0; i < 5; ++i)
      yt[i] = y[i] + Real(h) * (Real(kA51) * k1[i] + Real(kA52) * k2[i] +
                                Real(kA53) * k3[i] + Real(kA54) * k4[i]);
    state<Real> k5 = rhs(yt);
    for (int i = 0; i < 5; ++i)
      yt[i] = y[i] + Real(h) * (Real(kA61) * k1[i] + Real(kA62) * k2[i] +
                                Real(kA63) * k3[i] + Real(kA64) * k4[i] + Real(kA65) * k5[i]);
    state<Real> k6 = rhs(yt);
    state<Real> y5;
    for (int i = 0; i < 5; ++i)
      y5[i] = y[i] + Real(h) * (Real(kB1) * k1[i] + Real(kB3) * k3[i] + Real(kB4) * k4[i] +
                                Real(kB5) * k5[i] + Real(kB6) * k6[i]);
    state<Real> k7 = rhs(y5);  // FSAL

    double cabs = std::max(to_double(y5[4]), 1e-30);
    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
      double e = h * to_double(Real(kE1) * k1[i] + Real(kE3) * k3[i] + Real(kE4) * k4[i] +
                               Real(kE5) * k5[i] + Real(kE6) * k6[i] + Real(kE7) * k7[i]);
      double scale = 1.0;
      if (i == 2) scale = std::max(1.0, std::fabs(to_double(y[2])));
      if (i == 3) scale = cabs;
      err = std::max(err, std::fabs(e) / scale);
    }

    if (err <= tol * h) {
      s += h;
      y = y5;
      f0 = k7;
      push_sample(s, y, f0);
      traj.stats.accepted++;
      traj.stats.min_step = std::min(traj.stats.min_step, h);
      traj.stats.max_step = std::max(traj.stats.max_step, h);
    } else {
      traj.stats.rejected++;
    }
    double grow = err > 0.0 ? 0.9 * std::pow(tol * h / err, 0.25) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  traj.stats.rhs_evaluations = rhs.evals;
  return traj;
}

}  // namespace

void extremal_params::validate() const {
  require(theta0 > -kPi && theta0 <= kPi, errc::invalid_argument,
          "theta0 must lie in (-pi, pi]");
  require(T > 0.0, errc::invalid_argument, "T must be positive");
  require(lambda.sign == 0 || lambda.sign == 1 || lambda.sign == -1, errc::invalid_argument,
          "lambda sign must be -1, 0, or +1");
}

extremal_trajectory integrate_extremal(const structure_params& sp, const extremal_params& ep,
                                       double tol, long max_steps) {
  ep.validate();
  require(tol >= 1e-14 && tol <= 1e-6, errc::invalid_argument,
          "integration tolerance must lie in [1e-14, 1e-6]");
  require(max_steps > 0, errc::invalid_argument, "max_steps must be positive");
  if (sp.prec == precision::extended) return integrate_impl<dd>(sp, ep, tol, max_steps);
  return integrate_impl<double>(sp, ep, tol, max_steps);
}

trajectory_sample extremal_trajectory::at(double s) const {
  require(!samples.empty(), errc::invalid_argument, "empty trajectory");
  if (s <= samples.front().s) return samples.front();
  if (s >= samples.back().s) return samples.back();
  auto cmp = [](const trajectory_sample& a, double v) { return a.s < v; };
  auto it = std::lower_bound(samples.begin(), samples.end(), s, cmp);
  std::size_t hi = static_cast<std::size_t>(it - samples.begin());
  std::size_t lo = hi - 1;
  double h = samples[hi].s - samples[lo].s;
  double u = (s - samples[lo].s) / h;

  // Cubic Hermite basis on [0,1].
  double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  double h10 = u * (1.0 - u) * (1.0 - u);
  double h01 = u * u * (3.0 - 2.0 * u);
  double h11 = u * u * (u - 1.0);

  auto interp = [&](double y0, double d0, double y1, double d1) {
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  };
  trajectory_sample out;
  out.s = s;
  out.point.x1 = interp(samples[lo].point.x1, derivatives[lo][0], samples[hi].point.x1,
                        derivatives[hi][0]);
  out.point.x2 = interp(samples[lo].point.x2, derivatives[lo][1], samples[hi].point.x2,
                        derivatives[hi][1]);
  out.theta =
      interp(samples[lo].theta, derivatives[lo][2], samples[hi].theta, derivatives[hi][2]);
  out.constraint = interp(samples[lo].constraint, derivatives[lo][3], samples[hi].constraint,
                          derivatives[hi][3]);
  return out;
}

polyline extremal_trajectory::to_polyline() const {
  std::vector<planar_point> pts;
  pts.reserve(samples.size());
  for (const trajectory_sample& s : samples) pts.push_back(s.point);
  return make_polyline(std::move(pts), false);
}

std::vector<partition_interval> sign_partition(const structure_params& sp,
                                               const extremal_trajectory& traj) {
  require(traj.stats.tol <= 1e-8, errc::invalid_argument,
          "sign partition needs an integration tolerance <= 1e-8");
  const std::vector<trajectory_sample>& smp = traj.samples;
  require(smp.size() >= 2, errc::invalid_argument, "trajectory too short");

  std::vector<double> p(smp.size());
  double beta = 0.0;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    p[i] = eval_p(sp, smp[i].point);
    beta = std::max(beta, std::fabs(p[i]));
  }
  const double noise = 1e-14 * std::max(1.0, beta);

  std::vector<partition_interval> out;
  if (beta <= 1e-14) {
    // The singular candidate (P identically zero to roundoff).
    out.push_back({0.0, traj.duration(), interval_sign::zero});
    return out;
  }

  // A long run inside the noise floor is a tangency: report, do not guess.
  std::size_t hover = 0;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    if (std::fabs(p[i]) <= noise) {
      if (++hover > 1000)
        fail(errc::unresolved_zero, "P hovers at the noise floor over a long interval");
    } else {
      hover = 0;
    }
  }

  auto p_at = [&](double s) { return eval_p(sp, traj.at(s).point); };

  std::vector<double> zeros;
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    double a = smp[i].s, b = smp[i + 1].s;
    double pa = p[i], pb = p[i + 1];
    if ((pa > 0.0 && pb > 0.0) || (pa < 0.0 && pb < 0.0)) continue;
    if (pa == 0.0 && pb == 0.0) continue;
    // bracketed sign change (or an exact zero at a sample)
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (a + b);
      double pm = p_at(mid);
      if (std::fabs(pm) <= noise) {
        a = b = mid;
        break;
      }
      if ((pm > 0.0) == (pa > 0.0)) {
        a = mid;
        pa = pm;
      } else {
        b = mid;
        pb = pm;
      }
    }
    double z = 0.5 * (a + b);
    if (z > 1e-12 && z < traj.duration() * (1.0 - 1e-12)) zeros.push_back(z);
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(),
                          [&](double a, double b) { return std::fabs(a - b) < 1e-12; }),
              zeros.end());

  std::vector<double> taus;
  taus.push_back(0.0);
  for (double z : zeros) taus.push_back(z);
  taus.push_back(traj.duration());

  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    partition_interval iv;
    iv.tau_lo = taus[i];
    iv.tau_hi = taus[i + 1];
    double probe = p_at(0.5 * (iv.tau_lo + iv.tau_hi));
    iv.label = probe > noise    ? interval_sign::plus
               : probe < -noise ? interval_sign::minus
                                : interval_sign::zero;
    out.push_back(iv);
  }
  return out;
}

polyline close_through_candidate(const structure_params& sp, const polyline& c, int samples) {
  require(!c.closed, errc::invalid_argument, "curve is already closed");
  planar_point last = c.vertices.back();
  planar_point first = c.vertices.front();
  std::vector<planar_point> pts = c.vertices;
  double t_hi = last.x2, t_lo = first.x2;
  for (int i = 1; i < samples; ++i) {
    double t = t_hi + (t_lo - t_hi) * (static_cast<double>(i) / samples);
    planar_point q{t >= 0.0 ? sp.half_power(t) : 0.0, t};
    if (norm(q - pts.back()) > 0.0) pts.push_back(q);
  }
  if (norm(first - pts.back()) > 0.0) pts.push_back(first);
  return make_polyline(std::move(pts), true);
}

diagnostics_report diagnostics(const structure_params& sp, const extremal_trajectory& traj) {
  planar_point target = sp.a_eps();
  planar_point end = traj.endpoint().point;
  require(norm(end - target) <= 1e-6, errc::invalid_argument,
          "diagnostics expect a trajectory ending within 1e-6 of A_eps");

  diagnostics_report rep;
  rep.lambda_sign = traj.params.lambda.sign;
  rep.partition = sign_partition(sp, traj);

  const std::vector<trajectory_sample>& smp = traj.samples;
  double min_x1_interior = std::numeric_limits<double>::infinity();
  double max_x1 = 0.0, max_abs_x2 = 0.0;
  double min_p_interior = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < smp.size(); ++i) {
    double p = eval_p(sp, smp[i].point);
    if (std::fabs(p) > rep.beta) {
      rep.beta = std::fabs(p);
      rep.beta_argmax = smp[i].s;
    }
    max_x1 = std::max(max_x1, smp[i].point.x1);
    max_abs_x2 = std::max(max_abs_x2, std::fabs(smp[i].point.x2));
    bool interior = smp[i].s > 1e-9 * traj.duration() &&
                    smp[i].s < traj.duration() * (1.0 - 1e-9);
    if (interior) {
      min_x1_interior = std::min(min_x1_interior, smp[i].point.x1);
      min_p_interior = std::min(min_p_interior, p);
    }
  }

  stable_sum turning;
  for (std::size_t i = 0; i + 1 < smp.size(); ++i)
    turning += std::fabs(smp[i + 1].theta - smp[i].theta);
  rep.total_abs_turning = turning.value();

  // Loop list: repeat first_loop past each discovered loop.
  polyline poly = traj.to_polyline();
  double from = 0.0;
  while (true) {
    std::optional<loop_interval> loop = first_loop(poly, from);
    if (!loop) break;
    loop_info info;
    info.s_minus = loop->s_minus;
    info.s_plus = loop->s_plus;
    info.length = loop->s_plus - loop->s_minus;
    for (const trajectory_sample& s : smp)
      if (s.s >= loop->s_minus && s.s <= loop->s_plus)
        info.max_abs_p = std::max(info.max_abs_p, std::fabs(eval_p(sp, s.point)));
    rep.loops.push_back(info);
    from = loop->s_plus;
    if (rep.loops.size() > 64) break;
  }

  double eps = sp.epsilon;
  double eps_pow = std::pow(eps, 3.0 * sp.mbar - 1.0);
  double log_beta = rep.beta > 0.0 ? std::log(rep.beta) : -1e30;

  item_check i1;
  i1.holds = min_x1_interior > 0.0 && max_abs_x2 <= 2.0 * eps;
  i1.margin = max_abs_x2 / (2.0 * eps);
  rep.prop3["i"] = i1;

  rep.prop3["ii"] = {true, rep.beta / eps_pow};
  rep.prop3["iii"] = {traj.params.lambda.sign < 0, static_cast<double>(traj.params.lambda.sign)};

  item_check i4;
  i4.holds = min_p_interior > 0.0;
  i4.margin = rep.beta > 0.0 ? min_p_interior / rep.beta : 0.0;
  rep.prop3["iv"] = i4;

  item_check i5;
  i5.holds = rep.loops.size() == 1;
  i5.margin = rep.loops.empty() ? 0.0 : traj.at(rep.loops.front().s_minus).point.x2 / eps;
  rep.prop3["v"] = i5;

  double lam_beta2 = 0.0;
  if (traj.params.lambda.sign != 0 && rep.beta > 0.0)
    lam_beta2 = std::exp(traj.params.lambda.log_mag + 2.0 * log_beta);
  rep.prop3["vi"] = {true, lam_beta2};

  // Local maxima of P along the samples, outside the first loop interval.
  double vii_margin = 0.0;
  if (traj.params.lambda.sign != 0 && !rep.loops.empty()) {
    for (std::size_t i = 1; i + 1 < smp.size(); ++i) {
      if (smp[i].s >= rep.loops.front().s_minus && smp[i].s <= rep.loops.front().s_plus)
        continue;
      double pm = eval_p(sp, smp[i - 1].point);
      double pc = eval_p(sp, smp[i].point);
      double pp = eval_p(sp, smp[i + 1].point);
      if (pc > pm && pc > pp && pc > 0.0) {
        double v = std::exp(traj.params.lambda.log_mag +
                            (1.0 + 1.0 / sp.mbar) * std::log(pc));
        vii_margin = std::max(vii_margin, v);
      }
    }
  }
  rep.prop3["vii"] = {true, vii_margin};

  item_check i8;
  i8.margin = rep.total_abs_turning / (6.0 * kPi);
  i8.holds = i8.margin <= 1.0 + 1e-9;
  rep.prop3["viii"] = i8;

  double eps_mbar = sp.half_power(eps);
  item_check l4;
  l4.holds = max_x1 <= 2.0 * eps_mbar && max_abs_x2 <= 2.0 * eps;
  l4.margin = max_x1 / (2.0 * eps_mbar);
  rep.lemma8["iv"] = l4;
  rep.lemma8["v"] = {true, rep.beta / eps_pow};

  return rep;
}

}  // namespace mlab
