#pragma once

#include <boost/container/small_vector.hpp>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>

#include "gluecert/interval.hpp"

namespace gluecert {

// Forward-mode derivative carrier over a base scalar T (double or Interval).
// `dx` holds the partials with respect to the active directions of the
// enclosing evaluation; an empty `dx` means all partials are zero, so
// constants cost nothing.  Partials live inline up to 16 directions; the
// derivative engines stay on the heap-free path for the usual spreads.
template <class T>
struct Dual {
  using partials_type = boost::container::small_vector<T, 16>;

  T v{};
  partials_type dx;

  Dual() = default;
  Dual(T value) : v(std::move(value)) {}
  Dual(T value, partials_type partials) : v(std::move(value)), dx(std::move(partials)) {}
  Dual(double c) requires(!std::is_same_v<T, double>) : v(c) {}

  static Dual seeded(T value, std::size_t ndirs, std::size_t dir, T seed) {
    Dual r(std::move(value));
    r.dx.assign(ndirs, T{});
    r.dx[dir] = std::move(seed);
    return r;
  }
};

using DDual = Dual<double>;
using IDual = Dual<Interval>;

namespace detail {

// Combine two partial vectors as fa*da + fb*db, honoring the empty-is-zero
// convention.
template <class Vec, class FA, class FB>
Vec combine(const Vec& da, const Vec& db, FA fa, FB fb) {
  const std::size_t n = std::max(da.size(), db.size());
  Vec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < da.size() && k < db.size())
      out[k] = fa(da[k]) + fb(db[k]);
    else if (k < da.size())
      out[k] = fa(da[k]);
    else
      out[k] = fb(db[k]);
  }
  return out;
}

template <class Vec, class F>
Vec map(const Vec& d, F f) {
  Vec out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) out[k] = f(d[k]);
  return out;
}

}  // namespace detail

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, detail::map(a.dx, [](const T& x) { return -x; })};
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, detail::combine(a.dx, b.dx, [](const T& x) { return x; },
                                     [](const T& y) { return y; })};
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, detail::combine(a.dx, b.dx, [](const T& x) { return x; },
                                     [](const T& y) { return -y; })};
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, detail::combine(a.dx, b.dx, [&](const T& x) { return x * b.v; },
                                     [&](const T& y) { return a.v * y; })};
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, detail::combine(a.dx, b.dx, [&](const T& x) { return x / b.v; },
                             [&](const T& y) { return -(q * y) / b.v; })};
}

template <class T>
Dual<T> operator+(const Dual<T>& a, double c) { return {a.v + c, a.dx}; }
template <class T>
Dual<T> operator+(double c, const Dual<T>& a) { return {c + a.v, a.dx}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) { return {a.v - c, a.dx}; }
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) {
  return {c - a.v, detail::map(a.dx, [](const T& x) { return -x; })};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) {
  return {a.v * c, detail::map(a.dx, [&](const T& x) { return x * c; })};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) { return a * c; }
template <class T>
Dual<T> operator/(const Dual<T>& a, double c) {
  return {a.v / c, detail::map(a.dx, [&](const T& x) { return x / c; })};
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& a) { return Dual<T>(c) / a; }

template <class T>
Dual<T> sqr(const Dual<T>& a) {
  T two_v = a.v + a.v;
  return {sqr(a.v), detail::map(a.dx, [&](const T& x) { return two_v * x; })};
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  T twos = s + s;
  return {s, detail::map(a.dx, [&](const T& x) { return x / twos; })};
}

}  // namespace gluecert
