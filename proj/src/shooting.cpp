#include "mlab/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace mlab {

namespace {

struct scales {
  double s1, s2, sc;
};

scales residual_scales(const structure_params& sp) {
  return {sp.half_power(sp.epsilon), sp.epsilon,
          pow_int(sp.epsilon, static_cast<unsigned>(2 * sp.m + 1))};
}

shooting_residual make_residual(const structure_params& sp, const trajectory_sample& end,
                                planar_point target, double constraint_target) {
  scales sc = residual_scales(sp);
  shooting_residual r;
  r.dx1 = end.point.x1 - target.x1;
  r.dx2 = end.point.x2 - target.x2;
  r.dconstraint = end.constraint - constraint_target;
  r.norm = std::max({std::fabs(r.dx1) / sc.s1, std::fabs(r.dx2) / sc.s2,
                     std::fabs(r.dconstraint) / sc.sc});
  return r;
}

// Unknown vector u -> extremal parameters. lambda magnitude and T live in the
// log domain; the lambda sign is frozen per seed.
extremal_params decode(const std::vector<double>& u, int lambda_sign, bool lambda_zero) {
  extremal_params ep;
  ep.theta0 = u[0];
  if (lambda_zero) {
    ep.lambda = signed_log(0, 0.0);
    ep.T = std::exp(u[1]);
  } else {
    ep.lambda = signed_log(lambda_sign, u[1]);
    ep.T = std::exp(u[2]);
  }
  return ep;
}

std::vector<double> encode(const extremal_params& ep, bool lambda_zero) {
  if (lambda_zero) return {ep.theta0, std::log(ep.T)};
  return {ep.theta0, ep.lambda.log_mag, std::log(ep.T)};
}

// Gaussian elimination with partial pivoting; n is 2 or 3 here.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a[i][k] * b[k];
    b[i] /= a[i][i];
  }
  return true;
}

struct eval_out {
  shooting_residual residual;
  double length = 0.0;
  bool ok = false;
};

eval_out evaluate(const structure_params& sp, const extremal_params& ep,
                  const solve_options& opts, planar_point target) {
  eval_out out;
  try {
    extremal_trajectory traj = integrate_extremal(sp, ep, opts.integration_tol, opts.max_steps);
    out.residual = make_residual(sp, traj.endpoint(), target, opts.constraint_target);
    out.length = traj.duration();
    out.ok = true;
  } catch (const error&) {
    out.residual.norm = std::numeric_limits<double>::infinity();
  }
  return out;
}

shooting_solution solve_from_seed(const structure_params& sp, const extremal_params& seed,
                                  const solve_options& opts, int seed_index) {
  planar_point target = opts.target.value_or(sp.a_eps());
  bool lambda_zero = opts.lambda_fixed_zero || seed.lambda.sign == 0;
  int lambda_sign = lambda_zero ? 0 : seed.lambda.sign;
  std::size_t n = lambda_zero ? 2 : 3;

  std::vector<double> u = encode(seed, lambda_zero);
  eval_out cur = evaluate(sp, decode(u, lambda_sign, lambda_zero), opts, target);

  shooting_solution best;
  best.seed_index = seed_index;
  best.params = decode(u, lambda_sign, lambda_zero);
  best.residual = cur.residual;
  best.length = cur.length;
  if (opts.keep_traces) best.trace.push_back(cur.residual.norm);

  if (!cur.ok) return best;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (cur.residual.norm <= opts.tol) {
      best.converged = true;
      break;
    }

    // Central-difference Jacobian of the scaled defect vector.
    scales sc = residual_scales(sp);
    std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
    bool jac_ok = true;
    for (std::size_t j = 0; j < n && jac_ok; ++j) {
      double h = std::max(1e-7, 1e-7 * std::fabs(u[j]));
      std::vector<double> up = u, um = u;
      up[j] += h;
      um[j] -= h;
      eval_out rp = evaluate(sp, decode(up, lambda_sign, lambda_zero), opts, target);
      eval_out rm = evaluate(sp, decode(um, lambda_sign, lambda_zero), opts, target);
      if (!rp.ok || !rm.ok) {
        jac_ok = false;
        break;
      }
      jac[0][j] = (rp.residual.dx1 - rm.residual.dx1) / (2.0 * h * sc.s1);
      jac[1][j] = (rp.residual.dx2 - rm.residual.dx2) / (2.0 * h * sc.s2);
      if (n == 3)
        jac[2][j] = (rp.residual.dconstraint - rm.residual.dconstraint) / (2.0 * h * sc.sc);
    }
    if (!jac_ok) break;

    std::vector<double> rhs = {cur.residual.dx1 / sc.s1, cur.residual.dx2 / sc.s2};
    if (n == 3) rhs.push_back(cur.residual.dconstraint / sc.sc);
    std::vector<std::vector<double>> a = jac;
    if (!solve_linear(a, rhs)) break;

    // Armijo backtracking on the residual norm.
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 24; ++bt) {
      std::vector<double> trial = u;
      for (std::size_t j = 0; j < n; ++j) trial[j] -= alpha * rhs[j];
      trial[0] = std::clamp(trial[0], -std::numbers::pi + 1e-12, std::numbers::pi);
      eval_out next = evaluate(sp, decode(trial, lambda_sign, lambda_zero), opts, target);
      if (next.ok && next.residual.norm <= (1.0 - 1e-4 * alpha) * cur.residual.norm) {
        u = trial;
        cur = next;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    best.iterations = iter + 1;
    if (opts.keep_traces) best.trace.push_back(cur.residual.norm);
    if (!moved) break;  // stagnation

    if (cur.residual.norm < best.residual.norm) {
      best.params = decode(u, lambda_sign, lambda_zero);
      best.residual = cur.residual;
      best.length = cur.length;
    }
  }
  if (cur.residual.norm <= opts.tol) {
    best.converged = true;
    best.params = decode(u, lambda_sign, lambda_zero);
    best.residual = cur.residual;
    best.length = cur.length;
  }
  return best;
}

bool same_parameters(const extremal_params& a, const extremal_params& b) {
  auto close = [](double x, double y) {
    return std::fabs(x - y) <= 1e-6 * std::max({1.0, std::fabs(x), std::fabs(y)});
  };
  if (a.lambda.sign != b.lambda.sign) return false;
  if (!close(a.theta0, b.theta0)) return false;
  if (!close(a.T, b.T)) return false;
  if (a.lambda.sign != 0 && !close(a.lambda.log_mag, b.lambda.log_mag)) return false;
  return true;
}

}  // namespace

shooting_residual shoot(const structure_params& sp, const extremal_params& ep, double tol,
                        std::optional<planar_point> target, double constraint_target) {
  extremal_trajectory traj = integrate_extremal(sp, ep, tol);
  return make_residual(sp, traj.endpoint(), target.value_or(sp.a_eps()), constraint_target);
}

std::vector<shooting_solution> solve_bvp(const structure_params& sp,
                                         const std::vector<extremal_params>& seeds,
                                         const solve_options& opts) {
  require(!seeds.empty(), errc::invalid_argument, "seed list is empty");
  require(opts.integration_tol <= opts.tol / 100.0, errc::invalid_argument,
          "integration tolerance must be <= tol/100");
  for (const extremal_params& s : seeds)
    if (s.lambda.sign > 0 && !opts.allow_positive_lambda)
      fail(errc::invalid_argument,
           "positive-lambda seeds need the diagnostic mode enabled");

  std::vector<shooting_solution> raw(seeds.size());
  int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      raw[i] = solve_from_seed(sp, seeds[i], opts, static_cast<int>(i));
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= seeds.size()) break;
        raw[i] = solve_from_seed(sp, seeds[i], opts, static_cast<int>(i));
      }
    };
    std::vector<std::future<void>> pool;
    for (int j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }

  // Distinct converged solutions, then the best non-converged per basin.
  std::vector<shooting_solution> out;
  for (const shooting_solution& s : raw) {
    if (!s.converged) continue;
    bool dup = false;
    for (const shooting_solution& t : out)
      if (same_parameters(s.params, t.params)) dup = true;
    if (!dup) out.push_back(s);
  }
  std::vector<shooting_solution> stalled;
  for (const shooting_solution& s : raw) {
    if (s.converged) continue;
    bool dup = false;
    for (shooting_solution& t : stalled)
      if (same_parameters(s.params, t.params)) {
        dup = true;
        if (s.residual.norm < t.residual.norm) t = s;
      }
    if (!dup) stalled.push_back(s);
  }
  out.insert(out.end(), stalled.begin(), stalled.end());

  std::sort(out.begin(), out.end(), [](const shooting_solution& a, const shooting_solution& b) {
    if (a.converged != b.converged) return a.converged;
    if (a.length != b.length) return a.length < b.length;
    return a.params.theta0 < b.params.theta0;
  });
  return out;
}

std::vector<sweep_entry> continuation_sweep(int m, const std::vector<double>& eps_list,
                                            const std::vector<extremal_params>& base_seeds,
                                            const solve_options& opts, precision prec) {
  require(!eps_list.empty(), errc::invalid_argument, "empty epsilon list");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    require(eps_list[i] > eps_list[i + 1], errc::input_not_sorted,
            "epsilon list must be strictly descending");

  std::vector<sweep_entry> out;
  std::vector<extremal_params> seeds = base_seeds;
  double prev_eps = 0.0;
  for (double eps : eps_list) {
    structure_params sp(m, eps, prec);
    if (!out.empty()) {
      // Warm start from the previous stage: rescale lambda by the regime
      // power and T proportionally to epsilon.
      std::vector<extremal_params> warmed;
      double lam_scale = -(3.0 * m - 2.0) * std::log(eps / prev_eps);
      for (const shooting_solution& s : out.back().solutions) {
        if (!s.converged) continue;
        extremal_params ep = s.params;
        if (ep.lambda.sign != 0) ep.lambda.log_mag += lam_scale;
        ep.T *= eps / prev_eps;
        warmed.push_back(ep);
      }
      if (!warmed.empty()) seeds = warmed;
    }
    sweep_entry entry;
    entry.epsilon = eps;
    entry.warm_start_failed = false;
    entry.solutions = solve_bvp(sp, seeds, opts);
    bool any = false;
    for (const shooting_solution& s : entry.solutions) {
      if (!s.converged) continue;
      any = true;
      try {
        extremal_trajectory traj = integrate_extremal(sp, s.params, opts.integration_tol);
        entry.solution_diagnostics.push_back(diagnostics(sp, traj));
      } catch (const error&) {
        // diagnostics are best-effort per solution
      }
    }
    entry.warm_start_failed = !any && !out.empty();
    out.push_back(std::move(entry));
    prev_eps = eps;
  }
  return out;
}

}  // namespace mlab
