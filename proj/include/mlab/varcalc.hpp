#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mlab/polyline.hpp"
#include "mlab/structure.hpp"

namespace mlab {

/// Length-minimization inside the sublevel region {P <= rho, x1 > 0}.
struct sublevel_problem {
  structure_params params;
  double rho = 0.0;
  double K = 1.0;  // regime constant: in-regime means rho < K * eps^{3m/2 - 1}

  sublevel_problem(structure_params sp, double rho_, double K_ = 1.0);
  bool regime_ok() const;
};

struct frho_values {
  double f = 0.0;
  double f1 = 0.0;  // first derivative
  double f2 = 0.0;  // second derivative
};

/// f_rho(t) = sqrt(t^m + rho) and its first two derivatives. The level curve
/// {P = rho, x1 > 0} is the graph x1 = f_rho(x2).
frho_values f_rho(const structure_params& sp, double rho, double t);

struct tangency {
  double t0 = 0.0;
  double t1 = 0.0;
  bool degenerate = false;  // chord misses the level curve; both set to zero
};

/// Contact parameter of the tangent from the origin to the level curve,
/// rho = (m/2 - 1) t0^m in closed form. Defined for every rho > 0.
double tangency_t0(const structure_params& sp, double rho);

/// Parameters of the two tangent contacts of the constrained minimizer with
/// the level curve: t0 in closed form, t1 by safeguarded Newton. When the
/// chord [A0, A_eps] clears the level curve both are zero by convention.
tangency tangency_params(const structure_params& sp, double rho);

/// The constrained minimizer: tangent segment, level-curve arc, tangent
/// segment. Lengths are the exact per-piece values (quadrature for the arc);
/// the polyline is a curvature-adapted sampling.
struct nu_curve {
  double t0 = 0.0;
  double t1 = 0.0;
  polyline poly;
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
  double total_length() const { return l1 + l2 + l3; }
};

nu_curve build_nu(const sublevel_problem& problem, double samples_per_unit = 20000.0);

struct lower_bound_row {
  double rho = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double gap = 0.0;    // length of the candidate curve minus length of nu
  double ratio = 0.0;  // gap / rho^{1-1/m}
};

struct lower_bound_report {
  std::vector<lower_bound_row> rows;
  double fitted_c = 0.0;  // max ratio over the grid
  bool bounded = false;   // max/min ratio <= 3 over the grid
};

/// Sweeps the sublevel heights and measures the length gap against the
/// candidate curve; the gap is evaluated by stable differences of the three
/// pieces against the matching candidate pieces (no catastrophic
/// cancellation). All rho must be in regime.
lower_bound_report check_lower_bound(const sublevel_problem& problem,
                                     const std::vector<double>& rho_grid);

struct chord_arc_result {
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// Arc-minus-chord gap of the level curve over [t, s] against the closed-form
/// quadratic bound.
chord_arc_result chord_arc_gap(const structure_params& sp, double rho, double t, double s);

struct candidate_length {
  double L = 0.0;          // quadrature value
  double expansion = 0.0;  // eps + mbar^2 eps^{m-1} / (2(m-1))
  double residual = 0.0;
};

candidate_length length_bar_omega(const structure_params& sp);

struct perturbation_report {
  double min_excess = 0.0;
  bool all_nonneg = false;
  int projection_failures = 0;
  int trials = 0;
};

/// Random admissible competitors: smooth bump perturbations of the minimizer
/// polyline, projected back into the sublevel set vertex-wise, endpoints
/// fixed. Reports the worst length excess.
perturbation_report perturbation_test(const sublevel_problem& problem, int n_trials,
                                      std::uint64_t seed, double amplitude_factor = 1e-3);

struct regularity_row {
  double h = 0.0;
  double scaled_difference = 0.0;  // |Delta^k| / w^k
  double local_slope = 0.0;        // between consecutive grid points
};

struct regularity_report {
  std::vector<regularity_row> rows;
  double fitted_alpha = 0.0;    // log-log least-squares slope
  double one_sided_alpha = 0.0; // forward-difference cross-check at 0
};

/// Scaling exponent of k-th divided differences of x1 as a function of
/// arclength near the endpoint: slope of log(|Delta^k|/w^k) against log h at
/// base point s0 = h.
regularity_report regularity_probe(const structure_params& sp, int k,
                                   const std::vector<double>& scale_grid);

/// Same differencing machinery on an arbitrary scalar function; calibration
/// path for synthetic power functions.
regularity_report regularity_probe_function(const std::function<double(double)>& f, int k,
                                            const std::vector<double>& scale_grid);

}  // namespace mlab
