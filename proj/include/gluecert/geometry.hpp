#pragma once

#include <span>
#include <vector>

#include "gluecert/dual.hpp"
#include "gluecert/interval.hpp"

namespace gluecert {

// Generic point helpers shared by the scheme rules.  Written against the
// scalar contract (+, -, *, /, sqrt, sqr) so one implementation serves plain,
// interval and derivative-carrying evaluation.

namespace detail {
inline void clip_nonneg(double& x) { x = std::max(0.0, x); }
inline void clip_nonneg(Interval& x) { x.lo = std::max(0.0, x.lo); }
template <class T>
void clip_nonneg(Dual<T>& x) {
  clip_nonneg(x.v);
}
}  // namespace detail

template <class S>
S pnorm(std::span<const S> p) {
  using std::sqrt;
  S s{};
  for (const S& c : p) s = s + sqr(c);
  detail::clip_nonneg(s);  // a sum of squares; outward rounding may dip below 0
  return sqrt(s);
}

// ||v|| * v, written into out.  The generic version is the plain product.
template <class S>
void norm_scaled(std::span<const S> v, std::span<S> out) {
  S n = pnorm(v);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = n * v[i];
}

// ||v|| * v for dual scalars.  The naive chain rule divides by ||v||, which
// breaks down where v vanishes even though the map itself is C^1 there with
// derivative zero.  This overload uses the closed-form derivative
// D(||v|| v) = v v^T/||v|| + ||v|| I and encloses the first term by
// [-||v||, ||v||] per entry whenever ||v|| may vanish.
template <class T>
void norm_scaled(std::span<const Dual<T>> v, std::span<Dual<T>> out) {
  const std::size_t d = v.size();
  std::vector<T> a(d);
  for (std::size_t i = 0; i < d; ++i) a[i] = v[i].v;
  T nv = pnorm(std::span<const T>(a.data(), d));

  std::size_t np = 0;
  for (const auto& vi : v) np = std::max(np, vi.dx.size());

  // D(i,j) = a_i a_j / ||a|| + delta_ij ||a||
  std::vector<T> D(d * d);
  bool away_from_zero;
  if constexpr (std::is_same_v<T, double>) {
    away_from_zero = nv != 0.0;
  } else {
    away_from_zero = nv.lo > 0.0;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      T off;
      if (away_from_zero) {
        off = a[i] * a[j] / nv;
      } else {
        if constexpr (std::is_same_v<T, double>) {
          off = 0.0;  // exact limit at v = 0
        } else {
          off = Interval(-nv.hi, nv.hi);  // |a_i a_j| / ||a|| <= ||a||
        }
      }
      D[i * d + j] = (i == j) ? off + nv : off;
    }
  }

  for (std::size_t i = 0; i < d; ++i) {
    out[i].v = nv * a[i];
    out[i].dx.assign(np, T{});
    for (std::size_t k = 0; k < np; ++k) {
      T acc{};
      for (std::size_t j = 0; j < d; ++j) {
        if (k < v[j].dx.size()) acc = acc + D[i * d + j] * v[j].dx[k];
      }
      out[i].dx[k] = acc;
    }
  }
}

// Planar cross product (scalar) of two difference vectors.
template <class S>
S cross2(const S& ax, const S& ay, const S& bx, const S& by) {
  return ax * by - ay * bx;
}

}  // namespace gluecert
