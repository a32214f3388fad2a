#include "mlab/predicates.hpp"

#include <algorithm>
#include <cmath>

#include "mlab/scalar.hpp"

namespace mlab {

namespace {

// Grow-expansion style accumulation: maintains a nonoverlapping expansion of
// the running sum; the sign of the final expansion is the sign of its largest
// (last) nonzero component.
int append_exact(double* e, int n, double b) {
  double q = b;
  int k = 0;
  for (int i = 0; i < n; ++i) {
    double err;
    double s = two_sum(e[i], q, err);
    if (err != 0.0) e[k++] = err;
    q = s;
  }
  e[k++] = q;
  return k;
}

}  // namespace

int exact_sign_of_sum(const double* values, int count) {
  double e[32];
  int n = 0;
  for (int i = 0; i < count; ++i)
    if (values[i] != 0.0) n = append_exact(e, n, values[i]);
  if (n == 0) return 0;
  double msb = e[n - 1];
  if (msb > 0.0) return 1;
  if (msb < 0.0) return -1;
  return 0;
}

int orient2d(planar_point a, planar_point b, planar_point c) {
  double detleft = (a.x1 - c.x1) * (b.x2 - c.x2);
  double detright = (a.x2 - c.x2) * (b.x1 - c.x1);
  double det = detleft - detright;

  // Shewchuk's static filter: trust the floating sign outside the bound.
  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  } else {
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  }
  const double eps = std::numeric_limits<double>::epsilon() * 0.5;
  const double errbound = (3.0 + 16.0 * eps) * eps * detsum;
  if (det >= errbound) return 1;
  if (det <= -errbound) return -1;

  // Exact fallback: expand the determinant into six products of original
  // coordinates, each an exact double-double, and take the exact sign.
  double terms[12];
  double err;
  terms[0] = two_prod(a.x1, b.x2, err);
  terms[1] = err;
  terms[2] = two_prod(b.x1, c.x2, err);
  terms[3] = err;
  terms[4] = two_prod(c.x1, a.x2, err);
  terms[5] = err;
  terms[6] = two_prod(-a.x1, c.x2, err);
  terms[7] = err;
  terms[8] = two_prod(-b.x1, a.x2, err);
  terms[9] = err;
  terms[10] = two_prod(-c.x1, b.x2, err);
  terms[11] = err;
  return exact_sign_of_sum(terms, 12);
}

}  // namespace mlab
