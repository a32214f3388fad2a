#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlab/shooting.hpp"
#include "mlab/varcalc.hpp"

namespace mlab {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class rho_policy { absolute_list, regime_relative };

struct seed_grid_spec {
  double theta0_lo = -1.5, theta0_hi = 1.5;
  int theta0_count = 15;
  double loglambda_lo = 2.0, loglambda_hi = 32.0;  // natural log of |lambda|
  int loglambda_count = 14;
  std::vector<double> t_factors = {1.0, 1.05, 1.2, 1.5, 2.0};  // multiples of |A_eps|
  int lambda_sign = -1;
};

struct experiment_config {
  int m = 5;
  std::vector<double> epsilon_list = {0.2, 0.1};
  rho_policy rho_mode = rho_policy::regime_relative;
  std::vector<double> rho_list;   // absolute mode
  double rho_k = 1.0;             // regime mode
  int rho_decades = 3;
  int rho_per_decade = 4;
  double tol = 1e-9;
  seed_grid_spec seeds;
  int max_iter = 25;
  std::string output_dir = "out";
  bool plot = false;
  std::uint64_t rng_seed = 42;
  int jobs = 1;
  precision prec = precision::standard;

  void validate() const;
  std::string canonical_text() const;   // echoed into outputs
  std::uint64_t hash() const;           // FNV-1a over the canonical text
};

experiment_config parse_config_text(const std::string& text);
experiment_config load_config(const std::string& path);

std::vector<extremal_params> make_seed_grid(const structure_params& sp,
                                            const seed_grid_spec& spec);

std::vector<double> rho_grid_for(const experiment_config& config, double epsilon);

struct epsilon_report {
  double epsilon = 0.0;
  candidate_length l_bar;
  std::vector<shooting_solution> solutions;
  std::vector<diagnostics_report> solution_diagnostics;
  lower_bound_report lower_bound;
  int chord_arc_checked = 0;
  int chord_arc_violations = 0;
  int seed_attempts = 0;
};

struct run_report {
  std::string version = kToolkitVersion;
  std::uint64_t config_hash = 0;
  std::vector<epsilon_report> per_epsilon;
  std::vector<std::string> failures;  // hard invariant violations
  double wall_clock_seconds = 0.0;    // written to a sidecar, not the report file
};

/// Full orchestration: per epsilon runs the candidate-length quadrature, the
/// shooting grid, diagnostics, and the appendix grids; writes CSV/JSON plus
/// a failures manifest. Returns the report; exit code semantics: 0 iff
/// failures is empty.
run_report run(const experiment_config& config);

void write_report_json(const run_report& report, const experiment_config& config,
                       const std::string& path);

}  // namespace mlab
