#include "gluecert/difference.hpp"

#include <cmath>

namespace gluecert {

LaurentMask scheme_symbol(const LinearGlueScheme& a) {
  const auto& w = a.weights();
  const int m = a.info().m;
  // exponents lambda - 2r, r = 0..m, lambda in {0,1}: range [-2m, 1]
  LaurentMask mask;
  mask.t0 = -2 * m;
  mask.c = Eigen::VectorXd::Zero(2 * m + 2);
  for (int l = 0; l < 2; ++l)
    for (int r = 0; r <= m; ++r) mask.c(l - 2 * r - mask.t0) += w(l, r);
  return mask;
}

namespace {

// Divides the polynomial part by (1+z); returns false when the remainder is
// too large relative to the coefficient scale.
bool divide_one_plus_z(Eigen::VectorXd& c, double tol) {
  const int n = static_cast<int>(c.size());
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n - 1);
  double carry = 0.0;
  // c(z) = (1+z) q(z) + rem z^0: synthetic division from the top degree
  for (int k = n - 2; k >= 0; --k) {
    q(k) = c(k + 1) - carry;
    carry = q(k);
  }
  const double rem = c(0) - carry;
  const double scale = c.cwiseAbs().maxCoeff();
  if (std::abs(rem) > tol * std::max(1.0, scale)) return false;
  c = q;
  return true;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> window_matrices_from_rules(const Eigen::MatrixXd& rules) {
  const int width = static_cast<int>(rules.cols());
  const int nw = 2 * (width - 1) + 1;
  Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(nw, nw), b1 = Eigen::MatrixXd::Zero(nw, nw);
  for (int r = 0; r < nw; ++r) {
    for (int c = 0; c < width; ++c) {
      b0(r, r / 2 + c) = rules(r % 2, c);
      b1(r, (r + 1) / 2 + c) = rules((r + 1) % 2, c);
    }
  }
  return {b0, b1};
}

DifferenceScheme difference_scheme(const LinearGlueScheme& a, int j) {
  if (j < 0) throw DomainError("difference scheme order must be nonnegative");
  DifferenceScheme out;
  out.order = j;
  if (j == 0) {
    out.r0 = 0;
    out.rules = a.weights();
    auto [b0, b1] = a.window_matrices();
    out.b0 = b0;
    out.b1 = b1;
    return out;
  }

  // c_j(z) = c(z) z^j / (1+z)^j
  LaurentMask mask = scheme_symbol(a);
  Eigen::VectorXd c = mask.c;
  for (int step = 0; step < j; ++step) {
    if (static_cast<int>(c.size()) < 2 || !divide_one_plus_z(c, 1e-10)) {
      throw DomainError("difference scheme of order " + std::to_string(j) + " does not exist for " +
                        a.info().id);
    }
  }
  const int t0 = mask.t0 + j;  // multiplication by z^j

  // split exponents by parity into the two rules; weight at exponent t
  // multiplies Q_{i+r} with t = lambda - 2r
  int rmin = 0, rmax = 0;
  bool first = true;
  for (int k = 0; k < c.size(); ++k) {
    if (c(k) == 0.0) continue;
    const int t = t0 + k;
    const int lambda = ((t % 2) + 2) % 2;
    const int r = (lambda - t) / 2;
    if (first) {
      rmin = rmax = r;
      first = false;
    } else {
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  if (first) throw DomainError("difference scheme is identically zero");
  const int width = rmax - rmin + 1;
  out.r0 = rmin;
  out.rules = Eigen::MatrixXd::Zero(2, width);
  for (int k = 0; k < c.size(); ++k) {
    if (c(k) == 0.0) continue;
    const int t = t0 + k;
    const int lambda = ((t % 2) + 2) % 2;
    const int r = (lambda - t) / 2;
    out.rules(lambda, r - rmin) = c(k);
  }
  auto [b0, b1] = window_matrices_from_rules(out.rules);
  out.b0 = b0;
  out.b1 = b1;

  // residual of the defining identity: c_j * (1+z)^j must recover the symbol
  Eigen::VectorXd back = Eigen::VectorXd::Zero(c.size() + j);
  back.head(c.size()) = c;
  for (int step = 0; step < j; ++step) {
    for (int k = static_cast<int>(back.size()) - 1; k >= 1; --k) back(k) += back(k - 1);
  }
  double resid = 0.0;
  for (int k = 0; k < back.size(); ++k) {
    const double want = (k < mask.c.size()) ? mask.c(k) : 0.0;
    resid = std::max(resid, std::abs(back(k) - want));
  }
  out.residual = resid;
  if (resid > 1e-10)
    throw DomainError("difference scheme of order " + std::to_string(j) + " does not exist for " +
                      a.info().id);
  return out;
}

double jsr_upper(const Eigen::MatrixXd& b0, const Eigen::MatrixXd& b1, int ell) {
  if (ell < 1 || ell > 20) throw DomainError("jsr_upper: depth must lie in [1, 20]");
  double best = 0.0;
  // depth-first over all 2^ell products, reusing prefixes
  std::vector<Eigen::MatrixXd> stack(ell + 1);
  stack[0] = Eigen::MatrixXd::Identity(b0.rows(), b0.cols());
  std::vector<int> bits(ell, 0);
  int depth = 0;
  while (true) {
    while (depth < ell) {
      stack[depth + 1] = (bits[depth] == 0 ? b0 : b1) * stack[depth];
      ++depth;
    }
    best = std::max(best, stack[ell].cwiseAbs().rowwise().sum().maxCoeff());
    while (depth > 0 && bits[depth - 1] == 1) {
      bits[depth - 1] = 0;
      --depth;
    }
    if (depth == 0) break;
    bits[depth - 1] = 1;
    --depth;
  }
  return std::pow(best, 1.0 / ell);
}

}  // namespace gluecert
