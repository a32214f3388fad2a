#include "mlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "mlab/error.hpp"
#include "mlab/scalar.hpp"

namespace mlab {

namespace {

gl_rule build_gauss_legendre(int n) {
  gl_rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // recompute p0/p1 once more for the weight at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Gauss-Kronrod 15(7) coefficients (symmetric half).
constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct gk_eval {
  double kronrod;
  double err;
};

gk_eval gk15(const std::function<double(double)>& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double fc = f(mid);
  double gauss = fc * kG7Weights[3];
  double kron = fc * kK15Weights[7];
  for (int i = 0; i < 7; ++i) {
    double off = half * kK15Nodes[i];
    double fsum = f(mid - off) + f(mid + off);
    kron += fsum * kK15Weights[i];
    if (i % 2 == 1) gauss += fsum * kG7Weights[i / 2];
  }
  gk_eval out;
  out.kronrod = kron * half;
  double diff = (kron - gauss) * half;
  out.err = std::pow(200.0 * std::fabs(diff), 1.5);
  if (!(out.err < std::fabs(diff))) out.err = std::fabs(diff);
  return out;
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol_abs,
           int depth, int max_depth, stable_sum& value, stable_sum& err, int& subdivisions) {
  gk_eval e = gk15(f, a, b);
  if (e.err <= tol_abs || depth >= max_depth) {
    value += e.kronrod;
    err += e.err;
    return;
  }
  double mid = 0.5 * (a + b);
  ++subdivisions;
  adapt(f, a, mid, 0.5 * tol_abs, depth + 1, max_depth, value, err, subdivisions);
  adapt(f, mid, b, 0.5 * tol_abs, depth + 1, max_depth, value, err, subdivisions);
}

}  // namespace

const gl_rule& gauss_legendre(int n) {
  require(n >= 1 && n <= 64, errc::invalid_argument, "gauss_legendre order out of range");
  static std::map<int, gl_rule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

quad_result integrate(const std::function<double(double)>& f, double a, double b,
                      double rel_tol, double abs_tol, int max_depth) {
  quad_result out;
  if (a == b) return out;
  gk_eval first = gk15(f, a, b);
  double tol = std::max(abs_tol, rel_tol * std::fabs(first.kronrod));
  tol = std::max(tol, 1e2 * std::numeric_limits<double>::min());
  stable_sum value, err;
  int subdivisions = 0;
  adapt(f, a, b, tol, 0, max_depth, value, err, subdivisions);
  out.value = value.value();
  out.error = err.value();
  out.subdivisions = subdivisions;
  return out;
}

}  // namespace mlab
