#pragma once

#include <functional>
#include <vector>

namespace mlab {

struct gl_rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes (exact for polynomials of degree 2n-1).
/// Nodes by Newton iteration on P_n; rules are cached per n.
const gl_rule& gauss_legendre(int n);

template <class F>
double gl_integrate(const F& f, double a, double b, int n) {
  const gl_rule& rule = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

struct quad_result {
  double value = 0.0;
  double error = 0.0;       // estimated
  int subdivisions = 0;
};

/// Adaptive Gauss-Kronrod 15(7) with recursive bisection.
quad_result integrate(const std::function<double(double)>& f, double a, double b,
                      double rel_tol = 1e-14, double abs_tol = 0.0, int max_depth = 40);

}  // namespace mlab
