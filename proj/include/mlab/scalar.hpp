#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace mlab {

// ---------------------------------------------------------------------------
// Error-free transformations (Knuth two-sum, Dekker/FMA two-product).
// ---------------------------------------------------------------------------

inline double two_sum(double a, double b, double& err) {
  double s = a + b;
  double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
  return s;
}

/// Requires |a| >= |b|.
inline double fast_two_sum(double a, double b, double& err) {
  double s = a + b;
  err = b - (s - a);
  return s;
}

inline double two_prod(double a, double b, double& err) {
  double p = a * b;
  err = std::fma(a, b, -p);
  return p;
}

// ---------------------------------------------------------------------------
// Compensated (Neumaier) summation. Sum of doubles with one extra carry word.
// ---------------------------------------------------------------------------

class stable_sum {
 public:
  stable_sum() = default;
  explicit stable_sum(double v) : sum_(v) {}

  stable_sum& operator+=(double v) {
    double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + carry_; }
  void reset() { sum_ = carry_ = 0.0; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// ---------------------------------------------------------------------------
// Double-double: unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
// Enough of an arithmetic for the extended-precision backend; ~31 digits.
// ---------------------------------------------------------------------------

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  static dd from_sum(double a, double b) {
    double e;
    double s = two_sum(a, b, e);
    return dd(s, e);
  }
  static dd from_prod(double a, double b) {
    double e;
    double p = two_prod(a, b, e);
    return dd(p, e);
  }

  explicit operator double() const { return hi + lo; }
};

inline dd renorm(double hi, double lo) {
  double e;
  double s = fast_two_sum(hi, lo, e);
  return dd(s, e);
}

inline dd operator+(dd a, dd b) {
  double e1;
  double s = two_sum(a.hi, b.hi, e1);
  e1 += a.lo + b.lo;
  return renorm(s, e1);
}

inline dd operator-(dd a) { return dd(-a.hi, -a.lo); }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
  double e;
  double p = two_prod(a.hi, b.hi, e);
  e += a.hi * b.lo + a.lo * b.hi;
  return renorm(p, e);
}

inline dd operator/(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = a - dd(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - dd(q2) * b;
  double q3 = r.hi / b.hi;
  return renorm(q1, q2) + dd(q3);
}

inline dd operator+(dd a, double b) { return a + dd(b); }
inline dd operator+(double a, dd b) { return dd(a) + b; }
inline dd operator-(dd a, double b) { return a - dd(b); }
inline dd operator-(double a, dd b) { return dd(a) - b; }
inline dd operator*(dd a, double b) { return a * dd(b); }
inline dd operator*(double a, dd b) { return dd(a) * b; }
inline dd operator/(dd a, double b) { return a / dd(b); }
inline dd operator/(double a, dd b) { return dd(a) / b; }

inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }
inline bool operator>=(dd a, dd b) { return !(a < b); }
inline bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }

inline dd sqrt(dd a) {
  if (a.hi == 0.0 && a.lo == 0.0) return dd(0.0);
  double x = std::sqrt(a.hi);
  // one Newton step in dd: x' = (x + a/x)/2
  dd t = a / dd(x);
  double e;
  double s = two_sum(x, t.hi, e);
  e += t.lo;
  return renorm(0.5 * s, 0.5 * e);
}

inline dd fabs(dd a) { return (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) ? -a : a; }

// Overloads so templated kernels accept double or dd uniformly.
inline double to_double(double x) { return x; }
inline double to_double(dd x) { return static_cast<double>(x); }
inline double sqrt_of(double x) { return std::sqrt(x); }
inline dd sqrt_of(dd x) { return sqrt(x); }
inline double cos_of(double x) { return std::cos(x); }
inline double sin_of(double x) { return std::sin(x); }
// dd trig only ever sees O(1) headings; double-precision libm plus the dd
// carry of the argument is enough for the extended backend's purposes.
inline dd cos_of(dd x) { return dd(std::cos(x.hi)) - dd(std::sin(x.hi)) * dd(x.lo); }
inline dd sin_of(dd x) { return dd(std::sin(x.hi)) + dd(std::cos(x.hi)) * dd(x.lo); }

/// Integer power by squaring; exact at dyadic bases as long as no rounding
/// occurs, monotone near 0.
template <class Real>
Real pow_int(Real base, unsigned n) {
  Real result(1.0);
  Real b = base;
  while (n > 0) {
    if (n & 1u) result = result * b;
    b = b * b;
    n >>= 1u;
  }
  return result;
}

inline double pow_int(double base, unsigned n) { return pow_int<double>(base, n); }

// ---------------------------------------------------------------------------
// Signed-log scalar: value = sign * exp(log_mag). Keeps products evaluable
// across magnitudes that overflow/underflow raw doubles.
// ---------------------------------------------------------------------------

struct signed_log {
  int sign = 0;  // -1, 0, +1
  double log_mag = 0.0;

  signed_log() = default;
  signed_log(int s, double lm) : sign(s), log_mag(s == 0 ? 0.0 : lm) {}

  static signed_log from_value(double v) {
    if (v == 0.0) return signed_log(0, 0.0);
    return signed_log(v > 0.0 ? 1 : -1, std::log(std::fabs(v)));
  }

  double value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_mag);
  }

  /// this * v, staying in the log domain until the final exp.
  double times(double v) const {
    if (sign == 0 || v == 0.0) return 0.0;
    double lm = log_mag + std::log(std::fabs(v));
    double s = (v > 0.0 ? sign : -sign);
    // Forming the product directly is fine away from the extremes.
    if (lm > -690.0 && lm < 690.0) return s * std::exp(lm);
    if (lm <= -745.0) return 0.0;
    if (lm >= 710.0) return s * std::numeric_limits<double>::infinity();
    return s * std::exp(lm);
  }
};

enum class precision { standard, extended };

}  // namespace mlab
