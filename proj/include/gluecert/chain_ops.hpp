#pragma once

#include <Eigen/Dense>
#include <limits>
#include <utility>

#include "gluecert/chain.hpp"

namespace gluecert {

// A finite nonnegative value or infinity; the codomain of relative distortion.
class ExtendedReal {
public:
  ExtendedReal() = default;
  explicit ExtendedReal(double v) : v_(v) {
    if (!(v >= 0.0)) throw DomainError("extended real must be finite and nonnegative");
  }
  static ExtendedReal infinity() {
    ExtendedReal e;
    e.v_ = std::numeric_limits<double>::infinity();
    return e;
  }

  bool is_infinite() const { return std::isinf(v_); }
  double value() const {
    if (is_infinite()) throw DomainError("value() on infinite extended real");
    return v_;
  }
  // Infinity maps to +inf; convenient for comparisons and printing.
  double as_double() const { return v_; }

  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) { return a.v_ < b.v_; }
  friend bool operator<=(const ExtendedReal& a, double b) { return a.v_ <= b; }

private:
  double v_ = 0.0;
};

// Scale-relative cutoff below which a linear component counts as constant.
inline constexpr double kDegenerateTol = 1e-14;

struct MMatrices {
  Eigen::MatrixXd m1;  // n x (n-1)
  Eigen::MatrixXd m2;  // (n-1) x (n-2)
};

// The two explicit matrices with d = M1 * Delta d and Delta d = M2 * Delta^2 d
// for every d orthogonal to the linear chains.
MMatrices m_matrices(int n);

// K = M1 * M2; right inverse of Delta^2, image orthogonal to linear chains.
Eigen::MatrixXd k_matrix(int n);

// Orthogonal projection onto the linear chains (index-space n x n matrix,
// applied per coordinate).  Built from an orthonormal basis {constant, ramp}.
Eigen::MatrixXd projection_matrix(int n);

// Pi p: the linear component of p.
Chain project_linear(const Chain& p);

// Relative distortion |p|_2 / |Pi p|_1 of a single window, infinity when the
// linear component is (numerically) constant.
ExtendedReal kappa(const Chain& window);

// max over all length-n subchains.
ExtendedReal kappa_chain(const Chain& p, int n);

struct Normalized {
  Chain q;      // normalized chain, Pi q = e
  Similarity s; // the similarity with q = s(p)
};

// Maps p to a normalized chain whose linear component is the standard chain.
// Deterministic construction: translate, scale by the linear component's
// spacing, rotate the spacing direction onto the first axis (Householder).
Normalized normalize(const Chain& p);

}  // namespace gluecert
