#include "gluecert/boxes.hpp"

#include "gluecert/errors.hpp"

namespace gluecert {

IMat imat_mul(const IMat& x, const IMat& y) {
  if (x.cols != y.rows) throw DomainError("interval matrix shape mismatch");
  IMat z(x.rows, y.cols);
  for (int r = 0; r < x.rows; ++r)
    for (int c = 0; c < y.cols; ++c) {
      Interval acc(0.0);
      for (int k = 0; k < x.cols; ++k) acc = acc + x.at(r, k) * y.at(k, c);
      z.at(r, c) = acc;
    }
  return z;
}

namespace {

Interval widened(double v) { return {detail::step_down(v), detail::step_up(v)}; }

}  // namespace

std::pair<IMat, IMat> interval_m_matrices(int n) {
  if (n < 3) throw DomainError("interval_m_matrices requires n >= 3");
  IMat m1(n, n - 1), m2(n - 1, n - 2);
  for (int j = 0; j < n - 1; ++j) {
    const Interval base = widened(static_cast<double>(j + 1) / n);
    for (int i = 0; i < n; ++i) m1.at(i, j) = (i <= j) ? base - 1.0 : base;
  }
  // numerator and denominator are exact small integers in double
  const double den = static_cast<double>(n) * (1.0 + n) * (1.0 - n);
  for (int j = 0; j < n - 2; ++j) {
    const double num = (j + 1.0) * (j + 2.0) * (2.0 * j + 3.0 - 3.0 * n);
    const Interval base = widened(num / den);
    for (int i = 0; i < n - 1; ++i) m2.at(i, j) = (i <= j) ? base - 1.0 : base;
  }
  return {m1, m2};
}

IMat interval_k(int n) {
  auto [m1, m2] = interval_m_matrices(n);
  return imat_mul(m1, m2);
}

IMat interval_projection(int n) {
  if (n < 3) throw DomainError("interval_projection requires n >= 3");
  IMat pi(n, n);
  double rr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ri = i - 0.5 * (n - 1);
    rr += ri * ri;  // exact for these magnitudes
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double ri = i - 0.5 * (n - 1), rj = j - 0.5 * (n - 1);
      pi.at(i, j) = widened(1.0 / n) + widened(ri * rj / rr);
    }
  return pi;
}

int UBox::widest_coord() const {
  int best = 0;
  double w = -1.0;
  for (int i = 0; i < static_cast<int>(c.size()); ++i)
    if (c[i].width() > w) {
      w = c[i].width();
      best = i;
    }
  return best;
}

std::pair<UBox, UBox> UBox::split() const {
  const int k = widest_coord();
  UBox lo = *this, hi = *this;
  const double m = c[k].mid();
  lo.c[k] = Interval(c[k].lo, m);
  hi.c[k] = Interval(m, c[k].hi);
  lo.depth = hi.depth = depth + 1;
  return {lo, hi};
}

double UBox::volume() const {
  double v = 1.0;
  for (const Interval& x : c) v *= x.width();
  return v;
}

namespace {

// chain = e + K u, generic over how a u-entry is fetched
template <class S, class FetchU>
ChainT<S> embed_impl(int n, int d, FetchU fetch) {
  ChainT<S> q(d, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) {
      S acc = (c == 0) ? S(static_cast<double>(i + 1)) : S(0.0);
      for (int t = 0; t < n - 2; ++t) acc = acc + fetch(i, t, c);
      q.at(i, c) = acc;
    }
  return q;
}

}  // namespace

ChainT<Interval> embed_u(const UBox& u, const IMat& k, int n, int d) {
  if (static_cast<int>(u.c.size()) != (n - 2) * d) throw DomainError("embed_u: box size mismatch");
  return embed_impl<Interval>(n, d, [&](int i, int t, int c) {
    return k.at(i, t) * u.c[static_cast<std::size_t>(t) * d + c];
  });
}

ChainT<Interval> embed_u(const UBox& u, int n, int d) { return embed_u(u, interval_k(n), n, d); }

ChainT<Interval> embed_u_center(const UBox& u, const IMat& k, int n, int d) {
  if (static_cast<int>(u.c.size()) != (n - 2) * d) throw DomainError("embed_u: box size mismatch");
  return embed_impl<Interval>(n, d, [&](int i, int t, int c) {
    return k.at(i, t) * Interval(u.c[static_cast<std::size_t>(t) * d + c].mid());
  });
}

ChainT<IDual> embed_u_dual(const UBox& u, const IMat& k, int n, int d) {
  const int nd = (n - 2) * d;
  if (static_cast<int>(u.c.size()) != nd) throw DomainError("embed_u_dual: box size mismatch");
  ChainT<IDual> q(d, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) {
      IDual acc(Interval(c == 0 ? static_cast<double>(i + 1) : 0.0));
      acc.dx.assign(nd, Interval(0.0));
      for (int t = 0; t < n - 2; ++t) {
        const std::size_t dir = static_cast<std::size_t>(t) * d + c;
        acc.v = acc.v + k.at(i, t) * u.c[dir];
        acc.dx[dir] = acc.dx[dir] + k.at(i, t);
      }
      q.at(i, c) = acc;
    }
  return q;
}

}  // namespace gluecert
