#pragma once

#include <Eigen/Dense>
#include <random>

#include "gluecert/chain.hpp"
#include "gluecert/chain_ops.hpp"

namespace gluecert::testutil {

inline std::mt19937_64 rng(unsigned seed = 12345) { return std::mt19937_64(seed); }

inline Chain random_chain(std::mt19937_64& r, int npoints, int dim, double spread = 2.0) {
  std::uniform_real_distribution<double> uni(-spread, spread);
  Chain p(dim, npoints);
  for (int i = 0; i < npoints; ++i)
    for (int c = 0; c < dim; ++c) p.at(i, c) = uni(r);
  return p;
}

// Random chain near the standard one; useful where degeneracy must be avoided.
inline Chain random_near_e(std::mt19937_64& r, int npoints, int dim, double eps = 0.2) {
  std::uniform_real_distribution<double> uni(-eps, eps);
  Chain p = standard_chain(npoints, dim);
  for (int i = 0; i < npoints; ++i)
    for (int c = 0; c < dim; ++c) p.at(i, c) += uni(r);
  return p;
}

inline Similarity random_similarity(std::mt19937_64& r, int dim) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = uni(r);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::RowVectorXd shift(dim);
  for (int j = 0; j < dim; ++j) shift(j) = 3.0 * uni(r);
  return Similarity(0.25 + 2.0 * std::abs(uni(r)), q, shift);
}

// Random element of the orthogonal complement of the linear chains, obtained
// by subtracting the linear component.
inline Chain random_complement(std::mt19937_64& r, int n, int dim, double scale = 1.0) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Chain p = random_chain(r, n, dim, scale);
    Chain d = p - project_linear(p);
    if (seminorm(d, 0) > 1e-6) return d;
  }
  throw std::runtime_error("random_complement: could not draw a nondegenerate sample");
}

inline double max_abs_diff(const Chain& a, const Chain& b) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a.at(i, c) - b.at(i, c)));
  return m;
}

}  // namespace gluecert::testutil
