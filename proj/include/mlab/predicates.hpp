#pragma once

#include "mlab/structure.hpp"

namespace mlab {

/// Sign of the orientation determinant (b-a) x (c-a): +1 for counterclockwise
/// a,b,c, -1 for clockwise, 0 for exactly collinear. The floating result is
/// trusted when its magnitude exceeds the rounding bound; otherwise the sign
/// is recomputed exactly from two-product/two-sum expansions.
int orient2d(planar_point a, planar_point b, planar_point c);

/// Exact sign of sum(values). Shewchuk-style expansion accumulation.
int exact_sign_of_sum(const double* values, int count);

}  // namespace mlab
