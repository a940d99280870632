#pragma once

#include <Eigen/Dense>
#include <utility>

#include "gluecert/builtin_schemes.hpp"

namespace gluecert {

// Laurent mask sum_k c[k] z^(t0+k); the subdivision symbol collects the rule
// weights at exponents lambda - 2r.
struct LaurentMask {
  int t0 = 0;
  Eigen::VectorXd c;
};

LaurentMask scheme_symbol(const LinearGlueScheme& a);

// Order-j difference scheme: rules b(lambda, r) act on Q_{i + r0 + r}, and
// the square window-matrix pair realizes the associated self-maps.
struct DifferenceScheme {
  int order = 0;
  int r0 = 0;                 // index offset of the first rule weight
  Eigen::MatrixXd rules;      // 2 x width; rows sum to 2^-order
  Eigen::MatrixXd b0, b1;     // (2w-1) x (2w-1) window matrices
  double residual = 0.0;      // symbol-division remainder magnitude

  Eigen::MatrixXd divided_rules() const { return std::pow(2.0, order) * rules; }
};

// Solves Delta^j A P = A_j Delta^j P by dividing the symbol by (1+z)^j.
// Throws DomainError when no such scheme exists (remainder above 1e-10).
DifferenceScheme difference_scheme(const LinearGlueScheme& a, int j);

// Window-matrix pair for a rule table acting on m_w+1 = width points.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> window_matrices_from_rules(const Eigen::MatrixXd& rules);

// rho_ell = max over the 2^ell products of the max row-sum norm, to the power
// 1/ell.  Upper-bounds the joint spectral radius for every depth.
double jsr_upper(const Eigen::MatrixXd& b0, const Eigen::MatrixXd& b1, int ell);

}  // namespace gluecert
