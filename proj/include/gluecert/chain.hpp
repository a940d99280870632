#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gluecert/errors.hpp"

namespace gluecert {

// Ordered list of points in R^d, stored flat (point i, coordinate c at
// i*dim + c).  Templated on the scalar so the same code handles plain,
// interval and derivative-carrying evaluations.
template <class S>
class ChainT {
public:
  ChainT() = default;
  ChainT(int dim, int npoints) : dim_(dim), v_(static_cast<std::size_t>(dim) * npoints) {
    if (dim < 1 || npoints < 1) throw DomainError("chain needs dim >= 1 and at least one point");
  }

  int dim() const { return dim_; }
  int size() const { return dim_ == 0 ? 0 : static_cast<int>(v_.size()) / dim_; }

  S& at(int i, int c) { return v_[static_cast<std::size_t>(i) * dim_ + c]; }
  const S& at(int i, int c) const { return v_[static_cast<std::size_t>(i) * dim_ + c]; }

  std::span<S> point(int i) { return {v_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)}; }
  std::span<const S> point(int i) const {
    return {v_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
  }

  std::vector<S>& raw() { return v_; }
  const std::vector<S>& raw() const { return v_; }

  ChainT window(int first, int count) const {
    if (first < 0 || count < 1 || first + count > size()) throw DomainError("window out of range");
    ChainT w(dim_, count);
    for (int i = 0; i < count; ++i)
      for (int c = 0; c < dim_; ++c) w.at(i, c) = at(first + i, c);
    return w;
  }

private:
  int dim_ = 0;
  std::vector<S> v_;
};

using Chain = ChainT<double>;

// Forward difference, applied k times.  diff(P, 0) is P itself.
template <class S>
ChainT<S> diff(const ChainT<S>& p, int k) {
  if (k < 0 || k >= p.size()) throw DomainError("difference order must satisfy 0 <= k < #P");
  ChainT<S> cur = p;
  for (int r = 0; r < k; ++r) {
    ChainT<S> nxt(cur.dim(), cur.size() - 1);
    for (int i = 0; i + 1 < cur.size(); ++i)
      for (int c = 0; c < cur.dim(); ++c) nxt.at(i, c) = cur.at(i + 1, c) - cur.at(i, c);
    cur = std::move(nxt);
  }
  return cur;
}

inline double point_norm(std::span<const double> p) {
  double s = 0.0;
  for (double c : p) s += c * c;
  return std::sqrt(s);
}

// |P|_0 = max_i ||p_i||; |P|_j = |Delta^j P|_0.
inline double seminorm(const Chain& p, int j) {
  if (j < 0 || j >= p.size()) throw DomainError("seminorm order must satisfy 0 <= j < #P");
  Chain d = diff(p, j);
  double m = 0.0;
  for (int i = 0; i < d.size(); ++i) m = std::max(m, point_norm(d.point(i)));
  return m;
}

inline Chain operator+(const Chain& a, const Chain& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) throw DomainError("chain shape mismatch");
  Chain r = a;
  for (std::size_t k = 0; k < r.raw().size(); ++k) r.raw()[k] += b.raw()[k];
  return r;
}

inline Chain operator-(const Chain& a, const Chain& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) throw DomainError("chain shape mismatch");
  Chain r = a;
  for (std::size_t k = 0; k < r.raw().size(); ++k) r.raw()[k] -= b.raw()[k];
  return r;
}

inline Chain operator*(double s, const Chain& a) {
  Chain r = a;
  for (double& x : r.raw()) x *= s;
  return r;
}

// Standard linear chain e = [e; 2e; ...; n e] with e the first unit vector.
inline Chain standard_chain(int npoints, int dim) {
  Chain e(dim, npoints);
  for (int i = 0; i < npoints; ++i) {
    e.at(i, 0) = i + 1;
    for (int c = 1; c < dim; ++c) e.at(i, c) = 0.0;
  }
  return e;
}

// Similarity p -> scale * p * Q + shift with Q orthogonal (points are rows).
class Similarity {
public:
  Similarity(double scale, Eigen::MatrixXd rot, Eigen::RowVectorXd shift)
      : scale_(scale), rot_(std::move(rot)), shift_(std::move(shift)) {
    if (scale_ <= 0.0) throw DomainError("similarity scale must be positive");
    if (rot_.rows() != rot_.cols() || rot_.rows() != shift_.cols())
      throw DomainError("similarity dimension mismatch");
    const Eigen::MatrixXd g = rot_.transpose() * rot_ - Eigen::MatrixXd::Identity(rot_.rows(), rot_.cols());
    if (g.cwiseAbs().maxCoeff() > 1e-12) throw DomainError("similarity matrix is not orthogonal");
  }

  static Similarity identity(int dim) {
    return Similarity(1.0, Eigen::MatrixXd::Identity(dim, dim), Eigen::RowVectorXd::Zero(dim));
  }

  int dim() const { return static_cast<int>(shift_.cols()); }
  double scale() const { return scale_; }
  const Eigen::MatrixXd& rotation() const { return rot_; }
  const Eigen::RowVectorXd& shift() const { return shift_; }

  Eigen::RowVectorXd apply(const Eigen::RowVectorXd& p) const { return scale_ * p * rot_ + shift_; }

  // (this o other)(p) = this(other(p))
  Similarity compose(const Similarity& other) const {
    return Similarity(scale_ * other.scale_, other.rot_ * rot_,
                      scale_ * other.shift_ * rot_ + shift_);
  }

  Similarity inverse() const {
    return Similarity(1.0 / scale_, rot_.transpose(), -(1.0 / scale_) * shift_ * rot_.transpose());
  }

private:
  double scale_;
  Eigen::MatrixXd rot_;
  Eigen::RowVectorXd shift_;
};

inline Chain apply_similarity(const Similarity& s, const Chain& p) {
  if (s.dim() != p.dim()) throw DomainError("similarity/chain dimension mismatch");
  Chain out(p.dim(), p.size());
  Eigen::RowVectorXd row(p.dim());
  for (int i = 0; i < p.size(); ++i) {
    for (int c = 0; c < p.dim(); ++c) row(c) = p.at(i, c);
    const Eigen::RowVectorXd q = s.apply(row);
    for (int c = 0; c < p.dim(); ++c) out.at(i, c) = q(c);
  }
  return out;
}

}  // namespace gluecert
