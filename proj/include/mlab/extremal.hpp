#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mlab/geometry.hpp"
#include "mlab/polyline.hpp"
#include "mlab/structure.hpp"

namespace mlab {

/// Unknowns of the planar extremal system: initial heading, multiplier in
/// signed-log form (its magnitude spans many orders across the regime), and
/// the integration length.
struct extremal_params {
  double theta0 = 0.0;     // in (-pi, pi]
  signed_log lambda;       // sign 0 means the straight-line case
  double T = 1.0;

  void validate() const;
};

struct trajectory_sample {
  double s = 0.0;
  planar_point point;
  double theta = 0.0;       // unwrapped
  double constraint = 0.0;  // running integral of P^2 dx2
};

struct step_stats {
  int accepted = 0;
  int rejected = 0;
  double tol = 0.0;
  double min_step = 0.0;
  double max_step = 0.0;
  int rhs_evaluations = 0;
};

struct extremal_trajectory {
  std::vector<trajectory_sample> samples;
  std::vector<std::array<double, 4>> derivatives;  // rhs at each sample, for dense output
  extremal_params params;
  step_stats stats;

  double duration() const { return samples.empty() ? 0.0 : samples.back().s; }
  trajectory_sample endpoint() const { return samples.back(); }

  /// Dense output by cubic Hermite interpolation between accepted steps.
  trajectory_sample at(double s) const;

  polyline to_polyline() const;
};

/// Integrates the extremal system (unit-speed heading flow, heading rate
/// lambda*Q, running constraint integral) with an adaptive embedded
/// Runge-Kutta 5(4) pair, local error per unit step <= tol.
extremal_trajectory integrate_extremal(const structure_params& sp, const extremal_params& ep,
                                       double tol, long max_steps = 4000000);

enum class interval_sign { plus, minus, zero };

struct partition_interval {
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  interval_sign label = interval_sign::zero;
};

/// Maximal intervals of constant sign of P along the trajectory; zeros
/// localized by bisection on the dense output. A whole-curve noise-floor
/// trajectory (the singular candidate) yields one degenerate zero interval.
std::vector<partition_interval> sign_partition(const structure_params& sp,
                                               const extremal_trajectory& traj);

struct loop_info {
  double s_minus = 0.0;
  double s_plus = 0.0;
  double length = 0.0;
  double max_abs_p = 0.0;
};

struct item_check {
  bool holds = true;
  double margin = 0.0;  // measured dimensionless ratio where the bound's constant is unnamed
};

struct diagnostics_report {
  double beta = 0.0;
  double beta_argmax = 0.0;
  int lambda_sign = 0;
  std::vector<partition_interval> partition;
  std::vector<loop_info> loops;
  double total_abs_turning = 0.0;
  std::map<std::string, item_check> prop3;   // keys "i".."viii"
  std::map<std::string, item_check> lemma8;  // keys "iv", "v"
};

/// Numerical ledger over the candidate-minimizer anatomy: sign and count
/// assertions are pass/fail, constant-dependent bounds report their measured
/// ratios. Requires the endpoint to sit near A_eps.
diagnostics_report diagnostics(const structure_params& sp, const extremal_trajectory& traj);

/// Closes a curve whose endpoints lie on the candidate curve by appending the
/// connecting arc of it (along which the weight P^2 vanishes).
polyline close_through_candidate(const structure_params& sp, const polyline& c,
                                 int samples = 256);

}  // namespace mlab
