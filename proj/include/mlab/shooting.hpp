#pragma once

#include <optional>
#include <vector>

#include "mlab/extremal.hpp"

namespace mlab {

struct shooting_residual {
  double dx1 = 0.0;          // endpoint defect in x1
  double dx2 = 0.0;          // endpoint defect in x2
  double dconstraint = 0.0;  // isoperimetric defect
  double norm = 0.0;         // scaled sup-norm (defects over eps^{m/2}, eps, eps^{2m+1})
};

struct solve_options {
  double tol = 1e-9;              // convergence threshold on residual.norm
  int max_iterations = 60;
  double integration_tol = 1e-11; // must be <= tol/100
  std::optional<planar_point> target;       // defaults to A_eps
  double constraint_target = 0.0;
  bool lambda_fixed_zero = false; // endpoint-only variant, unknowns (theta0, T)
  bool allow_positive_lambda = false;
  int jobs = 1;
  bool keep_traces = false;
  long max_steps = 4000000;  // per-integration step budget (scans use less)
};

struct shooting_solution {
  extremal_params params;
  shooting_residual residual;
  double length = 0.0;
  int iterations = 0;
  bool converged = false;
  int seed_index = -1;
  std::vector<double> trace;  // residual norm per iteration (seed entry first)
};

/// Integrates the extremal system from A_0 and reports the three scaled
/// defects against the target endpoint and constraint value.
shooting_residual shoot(const structure_params& sp, const extremal_params& ep, double tol,
                        std::optional<planar_point> target = std::nullopt,
                        double constraint_target = 0.0);

/// Damped Newton with central-difference Jacobian on (theta0, log|lambda|,
/// log T), lambda sign fixed by the seed. Returns all distinct converged
/// solutions plus the best non-converged iterate per parameter basin,
/// deterministically ordered (length, then theta0).
std::vector<shooting_solution> solve_bvp(const structure_params& sp,
                                         const std::vector<extremal_params>& seeds,
                                         const solve_options& opts);

struct sweep_entry {
  double epsilon = 0.0;
  std::vector<shooting_solution> solutions;
  std::vector<diagnostics_report> solution_diagnostics;  // converged solutions only
  bool warm_start_failed = false;
};

/// Continuation in epsilon (descending): warm-starts each epsilon from the
/// previous converged solutions with lambda rescaled by the regime power
/// (eps_new/eps_old)^{-(3m-2)}.
std::vector<sweep_entry> continuation_sweep(int m, const std::vector<double>& eps_list,
                                            const std::vector<extremal_params>& base_seeds,
                                            const solve_options& opts,
                                            precision prec = precision::standard);

}  // namespace mlab
