#include "mlab/varcalc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mlab/quadrature.hpp"

namespace mlab {

namespace {

// Integrand of candidate-curve length minus one: mbar^2 t^{m-2} / (1 + S0),
// a cancellation-free form of sqrt(1 + mbar^2 t^{m-2}) - 1.
double s0_minus_one(const structure_params& sp, double t) {
  double w = sp.mbar * sp.mbar * pow_int(t, static_cast<unsigned>(sp.m - 2));
  return w / (1.0 + std::sqrt(1.0 + w));
}

double s0_of(const structure_params& sp, double t) {
  return std::sqrt(1.0 + sp.mbar * sp.mbar * pow_int(t, static_cast<unsigned>(sp.m - 2)));
}

}  // namespace

sublevel_problem::sublevel_problem(structure_params sp, double rho_, double K_)
    : params(sp), rho(rho_), K(K_) {
  require(rho > 0.0, errc::invalid_argument, "rho must be positive");
  require(K > 0.0, errc::invalid_argument, "K must be positive");
}

bool sublevel_problem::regime_ok() const {
  return rho < K * std::pow(params.epsilon, 3.0 * params.mbar - 1.0);
}

frho_values f_rho(const structure_params& sp, double rho, double t) {
  require(t >= 0.0, errc::invalid_argument, "f_rho defined for t >= 0");
  require(rho > 0.0, errc::invalid_argument, "rho must be positive");
  frho_values out;
  unsigned m = static_cast<unsigned>(sp.m);
  double w = pow_int(t, m);
  out.f = std::sqrt(w + rho);
  if (t == 0.0) return out;  // f' and f'' carry t^{m-1}, t^{m-2} factors
  out.f1 = sp.mbar * pow_int(t, m - 1) / out.f;
  out.f2 = sp.mbar * pow_int(t, m - 2) * ((sp.m - 1.0) - sp.mbar * w / (w + rho)) / out.f;
  return out;
}

double tangency_t0(const structure_params& sp, double rho) {
  require(rho > 0.0, errc::invalid_argument, "rho must be positive");
  return std::pow(rho / (sp.mbar - 1.0), 1.0 / sp.m);
}

tangency tangency_params(const structure_params& sp, double rho) {
  require(rho > 0.0, errc::invalid_argument, "rho must be positive");
  const double eps = sp.epsilon;
  const double eps_mbar = sp.half_power(eps);

  // Does the chord [A0, A_eps] reach the level curve? The chord is
  // x1 = slope * x2 with slope = eps^{mbar-1}; the clearance
  // f_rho(t) - slope*t is convex-ish with a single interior minimum where
  // f' = slope.
  double slope = eps_mbar / eps;
  auto clearance = [&](double t) { return f_rho(sp, rho, t).f - slope * t; };
  double t_lo = 0.0, t_hi = eps;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (t_lo + t_hi);
    if (f_rho(sp, rho, mid).f1 < slope)
      t_lo = mid;
    else
      t_hi = mid;
  }
  if (clearance(0.5 * (t_lo + t_hi)) > 0.0) return {0.0, 0.0, true};

  tangency out;
  out.t0 = tangency_t0(sp, rho);

  // t1: tangent from A_eps; g(t) = f(t) + f'(t)(eps - t) - eps^mbar is
  // increasing on [t0, eps] (g' = f''*(eps-t) >= 0).
  auto g = [&](double t) {
    frho_values v = f_rho(sp, rho, t);
    return v.f + v.f1 * (eps - t) - eps_mbar;
  };
  double lo = out.t0, hi = eps;
  double glo = g(lo), ghi = g(hi);
  require(glo <= 0.0 && ghi >= 0.0, errc::bracket_failure,
          "tangency bracket has no sign change although the chord intersects the level curve");
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    frho_values v = f_rho(sp, rho, t);
    double gval = v.f + v.f1 * (eps - t) - eps_mbar;
    if (std::fabs(gval) <= 1e-16 * eps_mbar) break;
    if (gval > 0.0)
      hi = t;
    else
      lo = t;
    double gder = v.f2 * (eps - t);
    double next = gder != 0.0 ? t - gval / gder : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // safeguard by bisection
    if (std::fabs(next - t) <= 1e-17 * eps) {
      t = next;
      break;
    }
    t = next;
  }
  out.t1 = t;
  return out;
}

nu_curve build_nu(const sublevel_problem& problem, double samples_per_unit) {
  const structure_params& sp = problem.params;
  const double rho = problem.rho;
  const double eps = sp.epsilon;
  planar_point a0 = sp.a0();
  planar_point ae = sp.a_eps();

  tangency tg = tangency_params(sp, rho);
  nu_curve nu;
  nu.t0 = tg.t0;
  nu.t1 = tg.t1;

  if (tg.degenerate) {
    // The chord clears the sublevel set; the minimizer is the segment.
    int n = std::max(2, static_cast<int>(samples_per_unit * norm(ae - a0)));
    std::vector<planar_point> pts;
    for (int i = 0; i <= n; ++i) {
      double u = static_cast<double>(i) / n;
      pts.push_back({u * ae.x1, u * ae.x2});
    }
    nu.poly = make_polyline(std::move(pts), false);
    nu.l1 = nu.l2 = 0.0;
    nu.l3 = norm(ae - a0);
    return nu;
  }

  frho_values v0 = f_rho(sp, rho, tg.t0);
  frho_values v1 = f_rho(sp, rho, tg.t1);
  planar_point g0{v0.f, tg.t0};
  planar_point g1{v1.f, tg.t1};

  // Exact piece lengths: L1 = |(f(t0), t0)| = sqrt(t0^2 + mbar t0^m).
  nu.l1 = std::sqrt(tg.t0 * tg.t0 + sp.mbar * pow_int(tg.t0, static_cast<unsigned>(sp.m)));
  nu.l3 = std::hypot(eps - tg.t1, sp.half_power(eps) - v1.f);
  nu.l2 = integrate(
              [&](double t) {
                frho_values v = f_rho(sp, rho, t);
                return std::sqrt(1.0 + v.f1 * v.f1);
              },
              tg.t0, tg.t1, 1e-14)
              .value;

  std::vector<planar_point> pts;
  auto add_segment = [&](planar_point a, planar_point b) {
    int n = std::max(2, static_cast<int>(samples_per_unit * norm(b - a)));
    for (int i = 0; i < n; ++i) {
      double u = static_cast<double>(i) / n;
      pts.push_back({a.x1 + u * (b.x1 - a.x1), a.x2 + u * (b.x2 - a.x2)});
    }
  };
  add_segment(a0, g0);

  // Arc sampling: blend of uniform coverage and turning-equidistribution so
  // the curvature spike near t0 stays resolved.
  double span_u = tg.t1 - tg.t0;
  double span_k = v1.f1 - v0.f1;  // integral of f'' over the arc
  if (span_u > 1e-15 * eps && span_k > 0.0) {
    int n_arc = std::max(16, static_cast<int>(samples_per_unit * nu.l2));
    for (int i = 0; i < n_arc; ++i) {
      double target = static_cast<double>(i) / n_arc;
      double lo = tg.t0, hi = tg.t1;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double frac = 0.5 * (mid - tg.t0) / span_u +
                      0.5 * (f_rho(sp, rho, mid).f1 - v0.f1) / span_k;
        if (frac < target)
          lo = mid;
        else
          hi = mid;
      }
      double t = 0.5 * (lo + hi);
      pts.push_back({f_rho(sp, rho, t).f, t});
    }
  }
  add_segment(g1, ae);
  pts.push_back(ae);
  nu.poly = make_polyline(std::move(pts), false);
  return nu;
}

lower_bound_report check_lower_bound(const sublevel_problem& problem,
                                     const std::vector<double>& rho_grid) {
  const structure_params& sp = problem.params;
  const double eps = sp.epsilon;
  double regime_cap = problem.K * std::pow(eps, 3.0 * sp.mbar - 1.0);
  for (double rho : rho_grid)
    require(rho > 0.0 && rho < regime_cap, errc::regime_violation,
            "rho outside the regime (0, K*eps^{3m/2-1})");

  lower_bound_report rep;
  for (double rho : rho_grid) {
    tangency tg = tangency_params(sp, rho);
    lower_bound_row row;
    row.rho = rho;
    row.t0 = tg.t0;
    row.t1 = tg.t1;

    if (tg.degenerate) {
      // gap = L(bar omega) - |A_eps|; both ~ eps, difference stable enough.
      candidate_length cl = length_bar_omega(sp);
      row.gap = cl.L - norm(sp.a_eps());
    } else {
      // Stable decomposition of the gap into three piecewise differences.
      double b1_int = integrate([&](double t) { return s0_minus_one(sp, t); }, 0.0, tg.t0,
                                1e-14)
                          .value;
      double t0m = pow_int(tg.t0, static_cast<unsigned>(sp.m));
      double l1 = std::sqrt(tg.t0 * tg.t0 + sp.mbar * t0m);
      double b1_tail = -sp.mbar * t0m / (tg.t0 + l1);  // t0 - L1, cancellation-free
      double bracket1 = b1_int + b1_tail;

      double bracket2 = integrate(
                            [&](double t) {
                              double tm2 = pow_int(t, static_cast<unsigned>(sp.m - 2));
                              double tm = pow_int(t, static_cast<unsigned>(sp.m));
                              double num = sp.mbar * sp.mbar * tm2 * rho / (tm + rho);
                              frho_values v = f_rho(sp, rho, t);
                              return num / (s0_of(sp, t) + std::sqrt(1.0 + v.f1 * v.f1));
                            },
                            tg.t0, tg.t1, 1e-14)
                            .value;

      double b3_int = integrate([&](double t) { return s0_minus_one(sp, t); }, tg.t1, eps,
                                1e-14)
                          .value;
      double sigma1 = f_rho(sp, rho, tg.t1).f1;
      double b3_tail =
          -(eps - tg.t1) * sigma1 * sigma1 / (1.0 + std::sqrt(1.0 + sigma1 * sigma1));
      double bracket3 = b3_int + b3_tail;

      row.gap = bracket1 + bracket2 + bracket3;
    }
    row.ratio = row.gap / std::pow(rho, 1.0 - 1.0 / sp.m);
    rep.rows.push_back(row);
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const lower_bound_row& row : rep.rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  rep.fitted_c = hi;
  rep.bounded = !rep.rows.empty() && lo > 0.0 && hi / lo <= 3.0;
  return rep;
}

chord_arc_result chord_arc_gap(const structure_params& sp, double rho, double t, double s) {
  require(s >= t && t >= 0.0, errc::invalid_argument, "need s >= t >= 0");
  chord_arc_result out;
  out.bound = 0.5 * sp.mbar * sp.mbar * (sp.mbar - 1.0) *
              pow_int(s, static_cast<unsigned>(sp.m - 3)) * (s - t) * (s - t);
  if (s == t) {
    out.holds = true;
    return out;
  }
  // Chord slope computed without cancellation: (f(s)-f(t)) = (s^m - t^m)/(f(s)+f(t)).
  frho_values vs = f_rho(sp, rho, s);
  frho_values vt = f_rho(sp, rho, t);
  double sm = pow_int(s, static_cast<unsigned>(sp.m));
  double tm = pow_int(t, static_cast<unsigned>(sp.m));
  double mu = (sm - tm) / ((vs.f + vt.f) * (s - t));
  double root_mu = std::sqrt(1.0 + mu * mu);
  out.gap = integrate(
                [&](double u) {
                  double f1 = f_rho(sp, rho, u).f1;
                  return (f1 * f1 - mu * mu) / (std::sqrt(1.0 + f1 * f1) + root_mu);
                },
                t, s, 1e-14)
                .value;
  out.holds = out.gap <= out.bound * (1.0 + 1e-8) + 1e-30;
  return out;
}

candidate_length length_bar_omega(const structure_params& sp) {
  candidate_length out;
  const double eps = sp.epsilon;
  double excess =
      integrate([&](double t) { return s0_minus_one(sp, t); }, 0.0, eps, 1e-15).value;
  out.L = eps + excess;
  out.expansion = eps + sp.mbar * sp.mbar * pow_int(eps, static_cast<unsigned>(sp.m - 1)) /
                            (2.0 * (sp.m - 1.0));
  out.residual = excess - (out.expansion - eps);
  return out;
}

perturbation_report perturbation_test(const sublevel_problem& problem, int n_trials,
                                      std::uint64_t seed, double amplitude_factor) {
  require(n_trials >= 1, errc::invalid_argument, "need at least one trial");
  const structure_params& sp = problem.params;
  nu_curve nu = build_nu(problem);
  const std::vector<planar_point>& base = nu.poly.vertices;
  const double base_len = nu.poly.length();
  const double amplitude = amplitude_factor * sp.epsilon;
  const double total = nu.poly.length();

  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  perturbation_report rep;
  rep.trials = n_trials;
  rep.min_excess = std::numeric_limits<double>::infinity();

  std::vector<planar_point> work(base.size());
  for (int trial = 0; trial < n_trials; ++trial) {
    work = base;
    int bumps = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < bumps; ++b) {
      double center = uniform(0.05, 0.95) * total;
      double width = uniform(0.05, 0.25) * total;
      double ax = amplitude * uniform(-1.0, 1.0);
      double ay = amplitude * uniform(-1.0, 1.0);
      for (std::size_t i = 1; i + 1 < work.size(); ++i) {
        double s = nu.poly.cum_arclength[i];
        double w = std::exp(-((s - center) / width) * ((s - center) / width));
        work[i].x1 += ax * w;
        work[i].x2 += ay * w;
      }
    }
    // Vertex-wise level-set projection back into {P <= rho, x1 > 0}:
    // P <= rho is x1^2 <= rho + x2^m (for x2 < 0 the right side shrinks).
    for (std::size_t i = 1; i + 1 < work.size(); ++i) {
      double cap2;
      if (work[i].x2 >= 0.0) {
        cap2 = problem.rho + pow_int(work[i].x2, static_cast<unsigned>(sp.m));
      } else {
        cap2 = problem.rho - pow_int(-work[i].x2, static_cast<unsigned>(sp.m));
        if (cap2 <= 0.0) {  // no feasible x1 at this height; lift onto x2 = 0
          work[i].x2 = 0.0;
          cap2 = problem.rho;
          ++rep.projection_failures;
        }
      }
      double cap = std::sqrt(cap2);
      if (work[i].x1 > cap) work[i].x1 = cap;
      if (work[i].x1 <= 0.0) {
        work[i].x1 = 1e-12 * sp.epsilon;
        ++rep.projection_failures;
      }
    }
    stable_sum len;
    for (std::size_t i = 0; i + 1 < work.size(); ++i)
      len += std::hypot(work[i + 1].x1 - work[i].x1, work[i + 1].x2 - work[i].x2);
    double excess = len.value() - base_len;
    rep.min_excess = std::min(rep.min_excess, excess);
  }
  rep.all_nonneg = rep.min_excess >= -1e-8;
  return rep;
}

namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double fit_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
  double n = static_cast<double>(logx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < logx.size(); ++i) {
    sx += logx[i];
    sy += logy[i];
    sxx += logx[i] * logx[i];
    sxy += logx[i] * logy[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

regularity_report regularity_probe_function(const std::function<double(double)>& f, int k,
                                            const std::vector<double>& scale_grid) {
  require(k >= 1 && k <= 16, errc::invalid_argument, "difference order out of range");
  require(scale_grid.size() >= 3, errc::invalid_argument, "need at least 3 scales");

  regularity_report rep;
  std::vector<double> logh, logv;
  for (double h : scale_grid) {
    double s0 = h;
    double w = s0 / (k + 1);  // stencil stays strictly inside t > 0
    stable_sum acc;
    double scale = 0.0;
    for (int j = 0; j <= k; ++j) {
      double node = s0 + (0.5 * k - j) * w;
      double val = f(node);
      scale = std::max(scale, std::fabs(val));
      acc += ((j % 2 == 0) ? 1.0 : -1.0) * binomial(k, j) * val;
    }
    double delta = acc.value();
    if (std::fabs(delta) < 1e3 * std::numeric_limits<double>::epsilon() * scale)
      fail(errc::noise_floor,
           "divided differences at the noise floor; switch to extended precision");
    regularity_row row;
    row.h = h;
    row.scaled_difference = std::fabs(delta) / pow_int(w, static_cast<unsigned>(k));
    rep.rows.push_back(row);
    logh.push_back(std::log(h));
    logv.push_back(std::log(row.scaled_difference));
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.rows[i].local_slope = (logv[i] - logv[i - 1]) / (logh[i] - logh[i - 1]);
  rep.fitted_alpha = fit_slope(logh, logv);

  // One-sided cross-check at the endpoint itself.
  std::vector<double> lh2, lv2;
  for (double h : scale_grid) {
    double w = h / (k + 1);
    stable_sum acc;
    for (int j = 0; j <= k; ++j)
      acc += ((j % 2 == 0) ? 1.0 : -1.0) * binomial(k, j) * f((k - j) * w);
    double delta = std::fabs(acc.value());
    if (delta == 0.0) continue;
    lh2.push_back(std::log(h));
    lv2.push_back(std::log(delta / pow_int(w, static_cast<unsigned>(k))));
  }
  rep.one_sided_alpha = lh2.size() >= 2 ? fit_slope(lh2, lv2) : 0.0;
  return rep;
}

regularity_report regularity_probe(const structure_params& sp, int k,
                                   const std::vector<double>& scale_grid) {
  int k_max = static_cast<int>(std::ceil(sp.mbar + 1.5));
  require(k >= 1 && k <= k_max, errc::invalid_argument, "difference order out of range");
  for (double h : scale_grid)
    require(h >= 1e-9 && h <= 1e-1, errc::invalid_argument, "scale grid out of range");

  // Arclength along the candidate curve: s(t) = t + integral of (S0 - 1).
  auto s_of_t = [&](double t) {
    return t + integrate([&](double u) { return s0_minus_one(sp, u); }, 0.0, t, 1e-15).value;
  };
  auto t_of_s = [&](double s) {
    double t = s;
    for (int it = 0; it < 60; ++it) {
      double r = s_of_t(t) - s;
      double step = r / s0_of(sp, t);
      t -= step;
      if (std::fabs(step) <= 1e-16 * std::max(s, 1e-300)) break;
    }
    return t;
  };
  auto x1_of_s = [&](double s) { return sp.half_power(t_of_s(s)); };
  return regularity_probe_function(x1_of_s, k, scale_grid);
}

}  // namespace mlab
