// Command-line front end: candidate metrics, BVP shooting, continuation
// sweeps, sublevel-set checks, the regularity probe, SVG scenes, and a quick
// self-verification battery.

#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlab/geometry.hpp"
#include "mlab/harness.hpp"
#include "mlab/predicates.hpp"
#include "mlab/svg.hpp"

namespace {

using namespace mlab;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct common_flags {
  int m = 5;
  double epsilon = 0.1;
  std::string precision_name = "std";
  int jobs = 1;
  std::string out;
};

void add_common(CLI::App* cmd, common_flags& flags) {
  cmd->add_option("--m", flags.m, "odd exponent m >= 5");
  cmd->add_option("--epsilon", flags.epsilon, "endpoint parameter in (0, 0.5]");
  cmd->add_option("--precision", flags.precision_name, "numeric backend: std or ext")
      ->check(CLI::IsMember({"std", "ext"}));
  cmd->add_option("--jobs", flags.jobs, "parallel workers");
  cmd->add_option("--out", flags.out, "output directory or file");
}

structure_params params_of(const common_flags& flags) {
  return structure_params(flags.m, flags.epsilon,
                          flags.precision_name == "ext" ? precision::extended
                                                        : precision::standard);
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

polyline sample_candidate_curve(const structure_params& sp, int n) {
  std::vector<planar_point> pts;
  for (int i = 0; i <= n; ++i) {
    double t = sp.epsilon * i / n;
    pts.push_back({sp.half_power(t), t});
  }
  return make_polyline(std::move(pts), false);
}

int cmd_candidate(const common_flags& flags, int samples) {
  structure_params sp = params_of(flags);
  candidate_length cl = length_bar_omega(sp);
  std::printf("L(candidate)      = %.15g\n", cl.L);
  std::printf("series expansion  = %.15g\n", cl.expansion);
  std::printf("residual          = %.3e\n", cl.residual);
  std::printf("residual/eps^%d    = %.6e\n", sp.m - 1,
              cl.residual / pow_int(sp.epsilon, static_cast<unsigned>(sp.m - 1)));
  if (!flags.out.empty()) {
    polyline c = sample_candidate_curve(sp, samples);
    write_csv(c, flags.out);
    std::printf("wrote %s (%d samples)\n", flags.out.c_str(), samples + 1);
  }
  return kExitOk;
}

int cmd_shoot(const common_flags& flags, double theta0, double loglambda, int lambda_sign,
              double t_len, double tol, const std::string& seed_grid,
              const std::string& t_factors) {
  structure_params sp = params_of(flags);
  solve_options opts;
  opts.tol = tol;
  opts.integration_tol = std::min(1e-11, tol / 100.0);
  opts.jobs = flags.jobs;
  opts.keep_traces = true;

  std::vector<extremal_params> seeds;
  if (!seed_grid.empty()) {
    std::vector<double> g = parse_number_list(seed_grid);
    if (g.size() != 6) {
      std::fprintf(stderr, "--seed-grid expects th_lo,th_hi,th_n,lm_lo,lm_hi,lm_n\n");
      return kExitConfig;
    }
    seed_grid_spec spec;
    spec.theta0_lo = g[0];
    spec.theta0_hi = g[1];
    spec.theta0_count = static_cast<int>(g[2]);
    spec.loglambda_lo = g[3];
    spec.loglambda_hi = g[4];
    spec.loglambda_count = static_cast<int>(g[5]);
    spec.lambda_sign = lambda_sign;
    if (!t_factors.empty()) spec.t_factors = parse_number_list(t_factors);
    seeds = make_seed_grid(sp, spec);
  } else {
    extremal_params ep;
    ep.theta0 = theta0;
    ep.lambda = signed_log(lambda_sign, loglambda);
    ep.T = t_len > 0.0 ? t_len : norm(sp.a_eps());
    seeds.push_back(ep);
  }

  std::vector<shooting_solution> sols = solve_bvp(sp, seeds, opts);
  int converged = 0;
  for (const shooting_solution& s : sols) converged += s.converged ? 1 : 0;
  std::printf("seeds=%zu solutions=%zu converged=%d\n", seeds.size(), sols.size(), converged);
  candidate_length cl = length_bar_omega(sp);
  for (std::size_t i = 0; i < sols.size() && i < 12; ++i) {
    const shooting_solution& s = sols[i];
    std::printf("%s theta0=%+.12f log|lambda|=%.6f T=%.12f length=%.12f norm=%.3e\n",
                s.converged ? "[conv]" : "[stal]", s.params.theta0, s.params.lambda.log_mag,
                s.params.T, s.length, s.residual.norm);
    if (s.converged && s.length < cl.L - 1e-8 * sp.epsilon) {
      std::printf("  !! converged solution shorter than the candidate curve\n");
      return kExitInvariant;
    }
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path) {
  experiment_config cfg = config_path.empty() ? experiment_config() : load_config(config_path);
  run_report report = run(cfg);
  std::printf("report: %s/report.json (config hash %016llx)\n", cfg.output_dir.c_str(),
              static_cast<unsigned long long>(report.config_hash));
  for (const epsilon_report& er : report.per_epsilon) {
    int converged = 0;
    for (const shooting_solution& s : er.solutions) converged += s.converged ? 1 : 0;
    std::printf("eps=%g: L=%.12f seeds=%d converged=%d lb_bounded=%s\n", er.epsilon,
                er.l_bar.L, er.seed_attempts, converged,
                er.lower_bound.bounded ? "yes" : "no");
  }
  if (!report.failures.empty()) {
    for (const std::string& f : report.failures) std::fprintf(stderr, "failure: %s\n", f.c_str());
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_appendix(const common_flags& flags, const std::string& rho_text, double rho_k) {
  structure_params sp = params_of(flags);
  experiment_config cfg;
  cfg.m = flags.m;
  cfg.epsilon_list = {flags.epsilon};
  cfg.rho_k = rho_k;
  if (!rho_text.empty()) {
    cfg.rho_mode = rho_policy::absolute_list;
    cfg.rho_list = parse_number_list(rho_text);
  }
  std::vector<double> grid = rho_grid_for(cfg, flags.epsilon);
  sublevel_problem problem(sp, grid.front(), rho_k);
  lower_bound_report rep = check_lower_bound(problem, grid);
  std::printf("%-12s %-12s %-12s %-14s %-10s\n", "rho", "t0", "t1", "gap", "ratio");
  for (const lower_bound_row& row : rep.rows)
    std::printf("%-12.3e %-12.6e %-12.6e %-14.6e %-10.6f\n", row.rho, row.t0, row.t1, row.gap,
                row.ratio);
  std::printf("fitted C = %.6f, bounded within factor 3: %s\n", rep.fitted_c,
              rep.bounded ? "yes" : "no");

  int violations = 0, checked = 0;
  for (double rho : grid) {
    for (int i = 0; i <= 6; ++i)
      for (int j = i; j <= 6; ++j) {
        chord_arc_result r =
            chord_arc_gap(sp, rho, 3.0 * flags.epsilon * i / 6, 3.0 * flags.epsilon * j / 6);
        ++checked;
        violations += r.holds ? 0 : 1;
      }
  }
  std::printf("chord-arc: %d/%d hold\n", checked - violations, checked);
  return (rep.bounded && violations == 0) ? kExitOk : kExitInvariant;
}

int cmd_regularity(const common_flags& flags, int k) {
  structure_params sp = params_of(flags);
  std::vector<double> grid;
  for (double h = 1e-8; h <= 1.0001e-2; h *= std::pow(10.0, 0.25)) grid.push_back(h);
  regularity_report rep = regularity_probe(sp, k, grid);
  std::printf("%-12s %-16s %-10s\n", "h", "|D^k|/w^k", "slope");
  for (const regularity_row& row : rep.rows)
    std::printf("%-12.3e %-16.6e %-10.4f\n", row.h, row.scaled_difference, row.local_slope);
  std::printf("fitted exponent = %.4f (one-sided %.4f); expected m/2 - k = %.1f\n",
              rep.fitted_alpha, rep.one_sided_alpha, sp.mbar - k);
  return kExitOk;
}

int cmd_plot(const common_flags& flags, double rho, const std::string& traj_path) {
  structure_params sp = params_of(flags);
  std::vector<plot_curve> curves;
  curves.push_back({sample_candidate_curve(sp, 512), "candidate", "#1f77b4", 1.2, false});
  scene_annotations ann;
  ann.epsilon = sp.epsilon;
  ann.mbar = sp.mbar;
  ann.x_magnify = std::pow(sp.epsilon, -(sp.mbar - 1.0));
  std::vector<plot_marker> markers;
  if (rho > 0.0) {
    sublevel_problem problem(sp, rho, 1.0);
    nu_curve nu = build_nu(problem, 4096.0 / sp.epsilon);
    curves.push_back({nu.poly, "constrained minimizer", "#000000", 1.4, false});
    // the level curve {P = rho}
    std::vector<planar_point> level;
    for (int i = 0; i <= 256; ++i) {
      double t = sp.epsilon * 1.2 * i / 256;
      level.push_back({f_rho(sp, rho, t).f, t});
    }
    curves.push_back({make_polyline(std::move(level), false), "level curve", "#888888", 0.8,
                      true});
    ann.rho = rho;
  }
  if (!traj_path.empty()) {
    polyline traj = traj_path.ends_with(".csv") ? read_csv(traj_path) : read_frame(traj_path);
    curves.push_back({traj, "extremal", "#d62728", 1.0, false});
    std::optional<loop_interval> loop = first_loop(traj);
    if (loop) {
      markers.push_back({traj.at(loop->s_minus), "loop", "#d62728"});
    }
  }
  std::string out = flags.out.empty() ? "scene.svg" : flags.out;
  plot_scene(curves, markers, ann, out);
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

int cmd_verify(const common_flags& flags) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };
  structure_params sp = params_of(flags);
  std::mt19937_64 rng(12345);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  {
    bool ok = true;
    for (int i = 0; i < 200; ++i) {
      planar_point p{uniform(-2, 2), uniform(-2, 2)};
      if (std::fabs(eval_q(sp, p) - 4.0 * p.x1 * eval_p(sp, p)) > 1e-15 * (1 + std::fabs(eval_q(sp, p))))
        ok = false;
    }
    check("Q = 4*x1*P as composed operations", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 200; ++i) {
      planar_point p{uniform(0.001, 2), uniform(0.001, 2)};
      planar_point g = grad_q(sp, p);
      double h = 1e-6 * std::max(1.0, norm(p));
      double d1 = (eval_q(sp, {p.x1 + h, p.x2}) - eval_q(sp, {p.x1 - h, p.x2})) / (2 * h);
      double d2 = (eval_q(sp, {p.x1, p.x2 + h}) - eval_q(sp, {p.x1, p.x2 - h})) / (2 * h);
      double scale = std::max({1.0, std::fabs(g.x1), std::fabs(g.x2)});
      if (std::fabs(g.x1 - d1) > 1e-6 * scale || std::fabs(g.x2 - d2) > 1e-6 * scale) ok = false;
    }
    check("grad Q matches central differences", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i <= 24; ++i) {
      double t = std::pow(10.0, -6.0 + 6.0 * i / 24.0);
      space_point g = candidate_gamma_bar(sp, t);
      double p = eval_p(sp, {g.x1, g.x2});
      double ref = pow_int(t, static_cast<unsigned>(sp.m));
      if (std::fabs(p) > 4.0 * std::numeric_limits<double>::epsilon() * ref) ok = false;
    }
    check("candidate curve rides the Martinet surface", ok);
  }
  {
    std::vector<double> resid;
    for (double eps : {0.2, 0.1, 0.05}) {
      structure_params spe(sp.m, eps);
      candidate_length cl = length_bar_omega(spe);
      resid.push_back(std::fabs(cl.residual) / pow_int(eps, static_cast<unsigned>(sp.m - 1)));
    }
    check("length expansion residual decreases", resid[0] > resid[1] && resid[1] > resid[2]);
  }
  {
    structure_params sp5(5, 0.1);
    std::vector<planar_point> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    polyline sq = make_polyline(square, true);
    weighted_area_report line = weighted_area(sp5, sq, area_method::line);
    weighted_area_report grid = weighted_area(sp5, sq, area_method::grid, 64);
    bool ok = std::fabs(line.value - 2.0 / 3.0) < 1e-14 &&
              std::fabs(line.value - grid.value) <= grid.estimated_error;
    check("unit-square weighted area (line 2/3, grid agrees)", ok);
    check("unit-square isoperimetric inequality", isoperimetric_check(sp5, sq, 64).holds);
  }
  {
    std::vector<planar_point> circle;
    for (int i = 0; i <= 1024; ++i) {
      double a = 2.0 * M_PI * i / 1024;
      circle.push_back({std::cos(a), std::sin(a)});
    }
    circle.back() = circle.front();
    polyline c = make_polyline(circle, true);
    turning_report tr = gauss_bonnet_audit(c, {});
    check("Gauss-Bonnet audit on the circle", tr.residual() < 1e-6);
    check("winding number of the origin", winding_number(c, {0, 0}) == 1);
  }
  {
    structure_params sp5(5, 0.1);
    check("tangency fixture t0 = 0.1",
          std::fabs(tangency_t0(sp5, 1.5e-5) - 0.1) < 1e-12 * 0.1);
  }
  {
    bool ok = true;
    for (int i = 0; i < 2000; ++i) {
      planar_point x{uniform(-0.5, 0.0), uniform(-0.5, 0.5)};
      planar_point y{uniform(-0.5, 0.0), uniform(-0.5, 0.5)};
      polyline pair = make_polyline({x, y}, false);
      polyline image = reflect_across_martinet(sp, pair, 1.0);
      double before = norm(y - x);
      double after = norm(image.vertices[1] - image.vertices[0]);
      if (after > before * (1.0 + 1e-10)) ok = false;
    }
    check("Martinet reflection is non-expansive", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 200; ++i) {
      double x2 = uniform(-1.5, 1.5);
      double level = uniform(-2.0, 2.0);
      for (double root : level_set_q(sp, level, x2)) {
        double q = eval_q(sp, {root, x2});
        if (std::fabs(q - level) > 1e-12 * std::max(1.0, std::fabs(level))) ok = false;
      }
    }
    check("level-set roots satisfy Q = level", ok);
  }
  {
    // lift of a closed curve equals the line-method weighted area
    std::vector<planar_point> pts;
    for (int i = 0; i <= 200; ++i) {
      double a = 2.0 * M_PI * i / 200;
      pts.push_back({0.6 + 0.4 * std::cos(a), 0.1 + 0.5 * std::sin(a)});
    }
    pts.back() = pts.front();
    polyline c = make_polyline(pts, true);
    std::vector<space_point> lift = horizontal_lift(sp, c, 0.25);
    double displacement = lift.back().x3 - lift.front().x3;
    double area = weighted_area(sp, c, area_method::line).value;
    check("horizontal lift closes onto the weighted area",
          std::fabs(displacement - area) <= 1e-12 * std::max(1.0, std::fabs(area)));
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for a planar isoperimetric length-minimization problem"};
  app.require_subcommand(1);

  common_flags flags;
  int samples = 4096;
  double theta0 = 0.0, loglambda = 10.0, t_len = 0.0, tol = 1e-9, rho = 0.0, rho_k = 1.0;
  int lambda_sign = -1, k_order = 2;
  std::string seed_grid, t_factors, config_path, rho_text, traj_path;

  CLI::App* candidate = app.add_subcommand("candidate", "candidate-curve metrics");
  add_common(candidate, flags);
  candidate->add_option("--samples", samples, "polyline samples");

  CLI::App* shoot_cmd = app.add_subcommand("shoot", "solve the boundary problem");
  add_common(shoot_cmd, flags);
  shoot_cmd->add_option("--theta0", theta0, "initial heading");
  shoot_cmd->add_option("--loglambda", loglambda, "log |lambda|");
  shoot_cmd->add_option("--lambda-sign", lambda_sign, "-1, 0, or +1");
  shoot_cmd->add_option("--T", t_len, "integration length (default: chord)");
  shoot_cmd->add_option("--tol", tol, "residual tolerance");
  shoot_cmd->add_option("--seed-grid", seed_grid, "th_lo,th_hi,th_n,lm_lo,lm_hi,lm_n");
  shoot_cmd->add_option("--t-factors", t_factors, "comma list of T multiples of the chord");

  CLI::App* sweep = app.add_subcommand("sweep", "config-driven experiment run");
  sweep->add_option("--config", config_path, "config file (TOML-compatible subset)");

  CLI::App* appendix = app.add_subcommand("appendix", "sublevel-set minimizer checks");
  add_common(appendix, flags);
  appendix->add_option("--rho", rho_text, "comma list of sublevel heights");
  appendix->add_option("--rho-k", rho_k, "regime constant K");

  CLI::App* regularity = app.add_subcommand("regularity", "endpoint regularity probe");
  add_common(regularity, flags);
  regularity->add_option("--k", k_order, "difference order");

  CLI::App* plot = app.add_subcommand("plot", "emit an SVG scene");
  add_common(plot, flags);
  plot->add_option("--rho", rho, "sublevel height for the minimizer overlay");
  plot->add_option("--traj", traj_path, "trajectory polyline (.csv or binary frame)");

  CLI::App* verify = app.add_subcommand("verify", "quick invariant battery");
  add_common(verify, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (candidate->parsed()) return cmd_candidate(flags, samples);
    if (shoot_cmd->parsed())
      return cmd_shoot(flags, theta0, loglambda, lambda_sign, t_len, tol, seed_grid, t_factors);
    if (sweep->parsed()) return cmd_sweep(config_path);
    if (appendix->parsed()) return cmd_appendix(flags, rho_text, rho_k);
    if (regularity->parsed()) return cmd_regularity(flags, k_order);
    if (plot->parsed()) return cmd_plot(flags, rho, traj_path);
    if (verify->parsed()) return cmd_verify(flags);
  } catch (const error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case errc::config_error:
      case errc::invalid_argument:
        return kExitConfig;
      case errc::step_underflow:
      case errc::step_limit:
      case errc::noise_floor:
      case errc::bracket_failure:
      case errc::unresolved_zero:
        return kExitNumerical;
      default:
        return kExitInvariant;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
