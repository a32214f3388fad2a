#include "mlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mlab/svg.hpp"

namespace mlab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void experiment_config::validate() const {
  require(m >= 5 && m % 2 == 1, errc::config_error, "m must be odd and >= 5");
  require(!epsilon_list.empty(), errc::config_error, "epsilon_list must be nonempty");
  for (std::size_t i = 0; i + 1 < epsilon_list.size(); ++i)
    require(epsilon_list[i] > epsilon_list[i + 1], errc::config_error,
            "epsilon_list must be strictly descending");
  for (double e : epsilon_list)
    require(e > 0.0 && e <= 0.5, errc::config_error, "epsilon must lie in (0, 0.5]");
  if (rho_mode == rho_policy::absolute_list)
    require(!rho_list.empty(), errc::config_error, "absolute rho policy needs rho_list");
  require(tol > 0.0, errc::config_error, "tol must be positive");
  require(max_iter >= 1, errc::config_error, "max_iter must be >= 1");
  require(jobs >= 1, errc::config_error, "jobs must be >= 1");
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(v[i]);
  }
  return out + "]";
}

}  // namespace

std::string experiment_config::canonical_text() const {
  std::ostringstream os;
  os << "epsilon_list = " << fmt_list(epsilon_list) << "\n";
  os << "jobs = " << jobs << "\n";
  os << "m = " << m << "\n";
  os << "max_iter = " << max_iter << "\n";
  os << "output_dir = \"" << output_dir << "\"\n";
  os << "plot = " << (plot ? "true" : "false") << "\n";
  os << "precision = \"" << (prec == precision::extended ? "ext" : "std") << "\"\n";
  os << "rho_decades = " << rho_decades << "\n";
  os << "rho_k = " << fmt_double(rho_k) << "\n";
  os << "rho_list = " << fmt_list(rho_list) << "\n";
  os << "rho_per_decade = " << rho_per_decade << "\n";
  os << "rho_policy = \"" << (rho_mode == rho_policy::absolute_list ? "absolute" : "regime")
     << "\"\n";
  os << "rng_seed = " << rng_seed << "\n";
  os << "seed_lambda_sign = " << seeds.lambda_sign << "\n";
  os << "seed_loglambda = [" << fmt_double(seeds.loglambda_lo) << ", "
     << fmt_double(seeds.loglambda_hi) << ", " << seeds.loglambda_count << "]\n";
  os << "seed_t_factors = " << fmt_list(seeds.t_factors) << "\n";
  os << "seed_theta0 = [" << fmt_double(seeds.theta0_lo) << ", " << fmt_double(seeds.theta0_hi)
     << ", " << seeds.theta0_count << "]\n";
  os << "tol = " << fmt_double(tol) << "\n";
  return os.str();
}

std::uint64_t experiment_config::hash() const {
  std::string text = canonical_text();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

struct toml_value {
  std::string raw;
  std::vector<std::string> items;  // set when the value is an array
  bool is_array = false;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    require(pos == s.size(), errc::config_error, "malformed number: " + s);
    return v;
  } catch (const std::exception&) {
    fail(errc::config_error, "malformed number: " + s);
  }
}

std::map<std::string, toml_value> parse_kv(const std::string& text) {
  std::map<std::string, toml_value> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    require(eq != std::string::npos, errc::config_error, "expected key = value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    require(!key.empty() && !value.empty(), errc::config_error, "empty key or value");
    toml_value tv;
    if (value.front() == '[') {
      require(value.back() == ']', errc::config_error, "unterminated array: " + line);
      tv.is_array = true;
      std::string body = value.substr(1, value.size() - 2);
      std::string item;
      std::istringstream items(body);
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) tv.items.push_back(item);
      }
    } else {
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      tv.raw = value;
    }
    out[key] = tv;
  }
  return out;
}

}  // namespace

experiment_config parse_config_text(const std::string& text) {
  std::map<std::string, toml_value> kv = parse_kv(text);
  experiment_config cfg;
  auto num = [&](const char* key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : to_number(it->second.raw);
  };
  auto str = [&](const char* key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second.raw;
  };
  auto list = [&](const char* key) {
    std::vector<double> out;
    auto it = kv.find(key);
    if (it == kv.end()) return out;
    require(it->second.is_array, errc::config_error, std::string(key) + " must be an array");
    for (const std::string& item : it->second.items) out.push_back(to_number(item));
    return out;
  };

  cfg.m = static_cast<int>(num("m", cfg.m));
  if (kv.count("epsilon_list")) cfg.epsilon_list = list("epsilon_list");
  std::string policy = str("rho_policy", "regime");
  if (policy == "absolute")
    cfg.rho_mode = rho_policy::absolute_list;
  else if (policy == "regime")
    cfg.rho_mode = rho_policy::regime_relative;
  else
    fail(errc::config_error, "rho_policy must be absolute or regime");
  cfg.rho_list = list("rho_list");
  cfg.rho_k = num("rho_k", cfg.rho_k);
  cfg.rho_decades = static_cast<int>(num("rho_decades", cfg.rho_decades));
  cfg.rho_per_decade = static_cast<int>(num("rho_per_decade", cfg.rho_per_decade));
  cfg.tol = num("tol", cfg.tol);
  cfg.max_iter = static_cast<int>(num("max_iter", cfg.max_iter));
  cfg.output_dir = str("output_dir", cfg.output_dir);
  std::string plot = str("plot", "false");
  cfg.plot = plot == "true";
  cfg.rng_seed = static_cast<std::uint64_t>(num("rng_seed", static_cast<double>(cfg.rng_seed)));
  cfg.jobs = static_cast<int>(num("jobs", cfg.jobs));
  std::string prec = str("precision", "std");
  require(prec == "std" || prec == "ext", errc::config_error, "precision must be std or ext");
  cfg.prec = prec == "ext" ? precision::extended : precision::standard;

  std::vector<double> th = list("seed_theta0");
  if (th.size() == 3) {
    cfg.seeds.theta0_lo = th[0];
    cfg.seeds.theta0_hi = th[1];
    cfg.seeds.theta0_count = static_cast<int>(th[2]);
  }
  std::vector<double> ll = list("seed_loglambda");
  if (ll.size() == 3) {
    cfg.seeds.loglambda_lo = ll[0];
    cfg.seeds.loglambda_hi = ll[1];
    cfg.seeds.loglambda_count = static_cast<int>(ll[2]);
  }
  std::vector<double> tf = list("seed_t_factors");
  if (!tf.empty()) cfg.seeds.t_factors = tf;
  cfg.seeds.lambda_sign = static_cast<int>(num("seed_lambda_sign", cfg.seeds.lambda_sign));

  cfg.validate();
  return cfg;
}

experiment_config load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::config_error, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::vector<extremal_params> make_seed_grid(const structure_params& sp,
                                            const seed_grid_spec& spec) {
  std::vector<extremal_params> seeds;
  double chord = norm(sp.a_eps());
  for (int i = 0; i < spec.theta0_count; ++i) {
    double th = spec.theta0_count == 1
                    ? spec.theta0_lo
                    : spec.theta0_lo + (spec.theta0_hi - spec.theta0_lo) * i /
                                           (spec.theta0_count - 1);
    for (int j = 0; j < spec.loglambda_count; ++j) {
      double lm = spec.loglambda_count == 1
                      ? spec.loglambda_lo
                      : spec.loglambda_lo + (spec.loglambda_hi - spec.loglambda_lo) * j /
                                                (spec.loglambda_count - 1);
      for (double tf : spec.t_factors) {
        extremal_params ep;
        ep.theta0 = th;
        ep.lambda = signed_log(spec.lambda_sign, lm);
        ep.T = tf * chord;
        seeds.push_back(ep);
      }
    }
  }
  return seeds;
}

std::vector<double> rho_grid_for(const experiment_config& config, double epsilon) {
  if (config.rho_mode == rho_policy::absolute_list) return config.rho_list;
  double mbar = 0.5 * config.m;
  double cap = config.rho_k * std::pow(epsilon, 3.0 * mbar - 1.0);
  std::vector<double> out;
  int total = config.rho_decades * config.rho_per_decade;
  for (int i = 0; i <= total; ++i) {
    double exponent = -1.0 - static_cast<double>(i) / config.rho_per_decade;
    out.push_back(cap * std::pow(10.0, exponent));
  }
  return out;
}

namespace {

ordered_json residual_json(const shooting_residual& r) {
  return ordered_json{{"dx1", r.dx1},
                      {"dx2", r.dx2},
                      {"dconstraint", r.dconstraint},
                      {"norm", r.norm}};
}

ordered_json solution_json(const shooting_solution& s) {
  ordered_json j;
  j["theta0"] = s.params.theta0;
  j["lambda_sign"] = s.params.lambda.sign;
  j["lambda_log_mag"] = s.params.lambda.log_mag;
  j["T"] = s.params.T;
  j["length"] = s.length;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["seed_index"] = s.seed_index;
  j["residual"] = residual_json(s.residual);
  if (!s.trace.empty()) j["trace"] = s.trace;
  return j;
}

ordered_json item_json(const std::map<std::string, item_check>& items) {
  ordered_json j;
  for (const auto& [key, check] : items)
    j[key] = ordered_json{{"holds", check.holds}, {"margin", check.margin}};
  return j;
}

ordered_json diagnostics_json(const diagnostics_report& d) {
  ordered_json j;
  j["beta"] = d.beta;
  j["beta_argmax"] = d.beta_argmax;
  j["lambda_sign"] = d.lambda_sign;
  j["total_abs_turning"] = d.total_abs_turning;
  ordered_json partition = ordered_json::array();
  for (const partition_interval& iv : d.partition)
    partition.push_back(ordered_json{
        {"tau_lo", iv.tau_lo},
        {"tau_hi", iv.tau_hi},
        {"label", iv.label == interval_sign::plus    ? "+"
                  : iv.label == interval_sign::minus ? "-"
                                                     : "0"}});
  j["sign_partition"] = partition;
  ordered_json loops = ordered_json::array();
  for (const loop_info& l : d.loops)
    loops.push_back(ordered_json{{"s_minus", l.s_minus},
                                 {"s_plus", l.s_plus},
                                 {"length", l.length},
                                 {"max_abs_p", l.max_abs_p}});
  j["loops"] = loops;
  j["prop3"] = item_json(d.prop3);
  j["lemma8"] = item_json(d.lemma8);
  return j;
}

void write_solutions_csv(const epsilon_report& er, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open " + path);
  out << "theta0,lambda_sign,lambda_log_mag,T,length,converged,iterations,norm\n";
  out.precision(17);
  for (const shooting_solution& s : er.solutions)
    out << s.params.theta0 << ',' << s.params.lambda.sign << ',' << s.params.lambda.log_mag
        << ',' << s.params.T << ',' << s.length << ',' << (s.converged ? 1 : 0) << ','
        << s.iterations << ',' << s.residual.norm << '\n';
}

void write_appendix_csv(const epsilon_report& er, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open " + path);
  out << "rho,t0,t1,gap,ratio\n";
  out.precision(17);
  for (const lower_bound_row& row : er.lower_bound.rows)
    out << row.rho << ',' << row.t0 << ',' << row.t1 << ',' << row.gap << ',' << row.ratio
        << '\n';
}

polyline sample_candidate(const structure_params& sp, int n) {
  std::vector<planar_point> pts;
  for (int i = 0; i <= n; ++i) {
    double t = sp.epsilon * i / n;
    pts.push_back({sp.half_power(t), t});
  }
  return make_polyline(std::move(pts), false);
}

}  // namespace

run_report run(const experiment_config& config) {
  config.validate();
  auto start = std::chrono::steady_clock::now();

  run_report report;
  report.config_hash = config.hash();
  fs::create_directories(config.output_dir);

  for (double eps : config.epsilon_list) {
    structure_params sp(config.m, eps, config.prec);
    epsilon_report er;
    er.epsilon = eps;
    er.l_bar = length_bar_omega(sp);

    std::vector<extremal_params> seeds = make_seed_grid(sp, config.seeds);
    er.seed_attempts = static_cast<int>(seeds.size());
    if (!seeds.empty()) {
      solve_options opts;
      opts.tol = config.tol;
      opts.integration_tol = std::min(1e-11, config.tol / 100.0);
      opts.max_iterations = config.max_iter;
      opts.jobs = config.jobs;
      opts.keep_traces = true;
      er.solutions = solve_bvp(sp, seeds, opts);
      for (const shooting_solution& s : er.solutions) {
        if (!s.converged) continue;
        try {
          extremal_trajectory traj = integrate_extremal(sp, s.params, opts.integration_tol);
          er.solution_diagnostics.push_back(diagnostics(sp, traj));
        } catch (const error& e) {
          report.failures.push_back("diagnostics failed at eps=" + fmt_double(eps) + ": " +
                                    e.what());
        }
        if (std::fabs(s.residual.dconstraint) <=
                config.tol * pow_int(eps, static_cast<unsigned>(2 * config.m + 1)) &&
            s.length < er.l_bar.L - 1e-8 * eps)
          report.failures.push_back("converged solution shorter than the candidate at eps=" +
                                    fmt_double(eps));
      }
    }

    std::vector<double> rho_grid = rho_grid_for(config, eps);
    if (!rho_grid.empty()) {
      sublevel_problem problem(sp, rho_grid.front(), config.rho_k);
      er.lower_bound = check_lower_bound(problem, rho_grid);
      for (const lower_bound_row& row : er.lower_bound.rows)
        if (row.gap < -1e-12)
          report.failures.push_back("negative lower-bound gap at rho=" + fmt_double(row.rho));
    }

    for (double rho : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
      for (int i = 0; i <= 6; ++i) {
        for (int j = i; j <= 6; ++j) {
          double t = 3.0 * eps * i / 6.0;
          double s = 3.0 * eps * j / 6.0;
          chord_arc_result r = chord_arc_gap(sp, rho, t, s);
          er.chord_arc_checked++;
          if (!r.holds) er.chord_arc_violations++;
        }
      }
    }
    if (er.chord_arc_violations > 0)
      report.failures.push_back("chord-arc violations at eps=" + fmt_double(eps));

    if (config.plot) {
      std::vector<plot_curve> curves;
      curves.push_back({sample_candidate(sp, 512), "candidate", "#1f77b4", 1.2, false});
      std::vector<double> grid = rho_grid_for(config, eps);
      if (!grid.empty()) {
        sublevel_problem problem(sp, grid.front(), config.rho_k);
        nu_curve nu = build_nu(problem, 4096.0 / eps);
        curves.push_back({nu.poly, "constrained minimizer", "#000000", 1.2, false});
      }
      scene_annotations ann;
      ann.epsilon = eps;
      ann.mbar = sp.mbar;
      if (!grid.empty()) ann.rho = grid.front();
      ann.x_magnify = std::pow(eps, -(sp.mbar - 1.0));
      plot_scene(curves, {}, ann,
                 config.output_dir + "/scene_eps_" + fmt_double(eps) + ".svg");
    }

    report.per_epsilon.push_back(std::move(er));
  }

  for (const epsilon_report& er : report.per_epsilon) {
    std::string tag = fmt_double(er.epsilon);
    write_solutions_csv(er, config.output_dir + "/solutions_eps_" + tag + ".csv");
    write_appendix_csv(er, config.output_dir + "/appendix_eps_" + tag + ".csv");
  }
  write_report_json(report, config, config.output_dir + "/report.json");

  {
    std::ofstream manifest(config.output_dir + "/failures.txt");
    for (const std::string& f : report.failures) manifest << f << '\n';
  }

  auto stop = std::chrono::steady_clock::now();
  report.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
  std::ofstream timing(config.output_dir + "/timing.txt");
  timing << "wall_clock_seconds = " << report.wall_clock_seconds << '\n';
  return report;
}

void write_report_json(const run_report& report, const experiment_config& config,
                       const std::string& path) {
  ordered_json j;
  j["version"] = report.version;
  j["config_hash"] = report.config_hash;
  j["config"] = config.canonical_text();
  ordered_json per_eps = ordered_json::array();
  for (const epsilon_report& er : report.per_epsilon) {
    ordered_json e;
    e["epsilon"] = er.epsilon;
    e["quadrature_rel_tol"] = 1e-14;
    e["l_bar"] = ordered_json{{"L", er.l_bar.L},
                              {"expansion", er.l_bar.expansion},
                              {"residual", er.l_bar.residual}};
    e["seed_attempts"] = er.seed_attempts;
    ordered_json sols = ordered_json::array();
    for (const shooting_solution& s : er.solutions) sols.push_back(solution_json(s));
    e["solutions"] = sols;
    ordered_json diags = ordered_json::array();
    for (const diagnostics_report& d : er.solution_diagnostics)
      diags.push_back(diagnostics_json(d));
    e["diagnostics"] = diags;
    ordered_json lb;
    lb["fitted_c"] = er.lower_bound.fitted_c;
    lb["bounded"] = er.lower_bound.bounded;
    ordered_json rows = ordered_json::array();
    for (const lower_bound_row& r : er.lower_bound.rows)
      rows.push_back(ordered_json{
          {"rho", r.rho}, {"t0", r.t0}, {"t1", r.t1}, {"gap", r.gap}, {"ratio", r.ratio}});
    lb["rows"] = rows;
    e["lower_bound"] = lb;
    e["chord_arc_checked"] = er.chord_arc_checked;
    e["chord_arc_violations"] = er.chord_arc_violations;
    per_eps.push_back(e);
  }
  j["per_epsilon"] = per_eps;
  j["failures"] = report.failures;

  std::ofstream out(path);
  require(out.good(), errc::io_failure, "cannot open " + path);
  out << j.dump(2) << '\n';
  require(out.good(), errc::io_failure, "write failed: " + path);
}

}  // namespace mlab
