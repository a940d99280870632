#pragma once

#include <utility>
#include <vector>

#include "gluecert/chain.hpp"
#include "gluecert/dual.hpp"
#include "gluecert/interval.hpp"

namespace gluecert {

// Interval matrix, row-major.
struct IMat {
  int rows = 0, cols = 0;
  std::vector<Interval> a;

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
  Interval& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  const Interval& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

IMat imat_mul(const IMat& x, const IMat& y);

// Interval enclosures of the explicit M1, M2, their product K, and of the
// projection matrix; entry formulas are one or two inexact operations, so
// outward rounding keeps the truth inside.
std::pair<IMat, IMat> interval_m_matrices(int n);
IMat interval_k(int n);
IMat interval_projection(int n);

// Axis-aligned box in the u-coordinates (u = second differences of the
// nonlinear part; (n-2)*d interval coordinates).
struct UBox {
  std::vector<Interval> c;
  int depth = 0;

  static UBox cube(int ncoords, double radius) {
    UBox b;
    b.c.assign(ncoords, Interval(-radius, radius));
    return b;
  }

  int widest_coord() const;
  std::pair<UBox, UBox> split() const;
  double volume() const;
};

// e + K u as an interval chain: encloses every normalized chain whose second
// differences lie in the box.
ChainT<Interval> embed_u(const UBox& u, const IMat& k, int n, int d);
ChainT<Interval> embed_u(const UBox& u, int n, int d);

// Same chain with derivative seeds: partial of coordinate (i,c) with respect
// to u-direction (t,c') is K(i,t) delta_{c,c'}.
ChainT<IDual> embed_u_dual(const UBox& u, const IMat& k, int n, int d);

// Thin chain at the box midpoint (point intervals), for mean-value forms.
ChainT<Interval> embed_u_center(const UBox& u, const IMat& k, int n, int d);

}  // namespace gluecert
