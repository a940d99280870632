#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "gluecert/errors.hpp"

namespace gluecert {

namespace detail {
// Outward step of at least one ulp, branchless: |x| * 2^-52 >= ulp(x) for
// normal x, and the subnormal term covers the rest.
inline constexpr double kUlpScale = 2.220446049250313e-16;  // 2^-52
inline constexpr double kSubnormal = 4.9406564584124654e-324;
inline double step_down(double x) { return x - (std::abs(x) * kUlpScale + kSubnormal); }
inline double step_up(double x) { return x + (std::abs(x) * kUlpScale + kSubnormal); }
}  // namespace detail

// Closed interval [lo, hi].  Soundness: every operation returns an interval
// containing the exact real result for all inputs in the operands.  The
// rounding mechanism is one-ulp outward inflation after each inexact
// double operation (portable; no rounding-mode switches, thread-safe).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {}
  Interval(double l, double h) : lo(l), hi(h) {}

  double mid() const { return 0.5 * (lo + hi); }
  double rad() const { return std::max(hi - mid(), mid() - lo); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool is_point() const { return lo == hi; }
};

inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator+(const Interval& a, const Interval& b) {
  return {detail::step_down(a.lo + b.lo), detail::step_up(a.hi + b.hi)};
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return {detail::step_down(a.lo - b.hi), detail::step_up(a.hi - b.lo)};
}

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {detail::step_down(std::min({p1, p2, p3, p4})),
          detail::step_up(std::max({p1, p2, p3, p4}))};
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) throw BoxUndecidable("division by zero-straddling interval");
  const double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
  return {detail::step_down(std::min({p1, p2, p3, p4})),
          detail::step_up(std::max({p1, p2, p3, p4}))};
}

inline Interval operator+(const Interval& a, double b) { return a + Interval(b); }
inline Interval operator+(double a, const Interval& b) { return Interval(a) + b; }
inline Interval operator-(const Interval& a, double b) { return a - Interval(b); }
inline Interval operator-(double a, const Interval& b) { return Interval(a) - b; }
inline Interval operator*(const Interval& a, double b) { return a * Interval(b); }
inline Interval operator*(double a, const Interval& b) { return Interval(a) * b; }
inline Interval operator/(const Interval& a, double b) { return a / Interval(b); }
inline Interval operator/(double a, const Interval& b) { return Interval(a) / b; }

inline double sqr(double x) { return x * x; }

// Tight square: [-1,1]^2 = [0,1], not [-1,1].
inline Interval sqr(const Interval& a) {
  const double m1 = std::abs(a.lo), m2 = std::abs(a.hi);
  const double big = std::max(m1, m2), sml = std::min(m1, m2);
  const double hi = detail::step_up(big * big);
  if (a.lo <= 0.0 && a.hi >= 0.0) return {0.0, hi};
  return {std::max(0.0, detail::step_down(sml * sml)), hi};
}

inline Interval sqrt(const Interval& a) {
  if (a.lo < 0.0) throw BoxUndecidable("sqrt of interval with negative part");
  // std::sqrt is correctly rounded, one ulp covers it
  return {std::max(0.0, detail::step_down(std::sqrt(a.lo))), detail::step_up(std::sqrt(a.hi))};
}

inline Interval abs(const Interval& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return {0.0, std::max(-a.lo, a.hi)};
}

inline Interval min(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

inline Interval max(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// Euclidean norm of a point with interval coordinates.  Sums of squares are
// nonnegative, so the rounding-induced negative sliver is clipped before the
// root is taken.
inline Interval point_norm(std::span<const Interval> p) {
  Interval s(0.0);
  for (const Interval& c : p) s = s + sqr(c);
  s.lo = std::max(0.0, s.lo);
  return sqrt(s);
}

}  // namespace gluecert
