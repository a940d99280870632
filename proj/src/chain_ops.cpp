#include "gluecert/chain_ops.hpp"

#include <cmath>

namespace gluecert {

MMatrices m_matrices(int n) {
  if (n < 3) throw DomainError("m_matrices requires n >= 3");
  MMatrices mm;
  mm.m1.resize(n, n - 1);
  for (int j = 0; j < n - 1; ++j) {
    const double base = static_cast<double>(j + 1) / n;
    for (int i = 0; i < n; ++i) mm.m1(i, j) = (i <= j) ? base - 1.0 : base;
  }
  mm.m2.resize(n - 1, n - 2);
  const double den = static_cast<double>(n) * (1.0 + n) * (1.0 - n);
  for (int j = 0; j < n - 2; ++j) {
    const double base = (j + 1.0) * (j + 2.0) * (2.0 * j + 3.0 - 3.0 * n) / den;
    for (int i = 0; i < n - 1; ++i) mm.m2(i, j) = (i <= j) ? base - 1.0 : base;
  }
  return mm;
}

Eigen::MatrixXd k_matrix(int n) {
  MMatrices mm = m_matrices(n);
  return mm.m1 * mm.m2;
}

Eigen::MatrixXd projection_matrix(int n) {
  if (n < 3) throw DomainError("projection requires n >= 3");
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd ramp(n);
  for (int i = 0; i < n; ++i) ramp(i) = i - 0.5 * (n - 1);
  return ones * ones.transpose() / static_cast<double>(n) +
         ramp * ramp.transpose() / ramp.squaredNorm();
}

Chain project_linear(const Chain& p) {
  const int n = p.size();
  if (n < 3) throw DomainError("project_linear requires at least 3 points");
  const Eigen::MatrixXd pi = projection_matrix(n);
  Eigen::MatrixXd x(n, p.dim());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < p.dim(); ++c) x(i, c) = p.at(i, c);
  const Eigen::MatrixXd y = pi * x;
  Chain out(p.dim(), n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < p.dim(); ++c) out.at(i, c) = y(i, c);
  return out;
}

ExtendedReal kappa(const Chain& window) {
  if (window.size() < 3) throw DomainError("kappa requires a window of at least 3 points");
  const Chain lin = project_linear(window);
  const double den = seminorm(lin, 1);
  if (den < kDegenerateTol * (1.0 + seminorm(window, 0))) return ExtendedReal::infinity();
  return ExtendedReal(seminorm(window, 2) / den);
}

ExtendedReal kappa_chain(const Chain& p, int n) {
  if (n < 3) throw DomainError("kappa_chain requires spread n >= 3");
  if (p.size() < n) throw DomainError("kappa_chain: chain shorter than the spread");
  ExtendedReal best(0.0);
  for (int i = 0; i + n <= p.size(); ++i) {
    ExtendedReal k = kappa(p.window(i, n));
    if (k.is_infinite()) return k;
    if (best < k) best = k;
  }
  return best;
}

namespace {

// Orthogonal matrix mapping the unit vector b onto the first axis.
Eigen::MatrixXd rotation_to_first_axis(const Eigen::RowVectorXd& b) {
  const int d = static_cast<int>(b.cols());
  Eigen::RowVectorXd e1 = Eigen::RowVectorXd::Zero(d);
  e1(0) = 1.0;
  Eigen::RowVectorXd v = b - e1;
  const double vn = v.norm();
  if (vn < 1e-12) return Eigen::MatrixXd::Identity(d, d);
  // Householder reflection: exact for b != e1, symmetric, orthogonal.
  return Eigen::MatrixXd::Identity(d, d) - (2.0 / (vn * vn)) * v.transpose() * v;
}

}  // namespace

Normalized normalize(const Chain& p) {
  const int n = p.size();
  const int d = p.dim();
  const Chain lin = project_linear(p);
  Eigen::RowVectorXd a(d), b(d);
  for (int c = 0; c < d; ++c) {
    a(c) = lin.at(0, c);
    b(c) = lin.at(1, c) - lin.at(0, c);
  }
  const double bn = b.norm();
  if (bn < kDegenerateTol * (1.0 + seminorm(p, 0)))
    throw DomainError("normalize: degenerate input, linear component is constant");

  const double scale = 1.0 / bn;
  const Eigen::MatrixXd rot = rotation_to_first_axis(b / bn);
  Eigen::RowVectorXd e1 = Eigen::RowVectorXd::Zero(d);
  e1(0) = 1.0;
  const Eigen::RowVectorXd shift = e1 - scale * a * rot;
  Similarity s(scale, rot, shift);
  return Normalized{apply_similarity(s, p), s};
}

}  // namespace gluecert
