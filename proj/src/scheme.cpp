#include "gluecert/scheme.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace gluecert {

namespace {

void check_finite(const Chain& out, const GlueScheme& g, const char* what) {
  for (int i = 0; i < out.size(); ++i)
    for (int c = 0; c < out.dim(); ++c)
      if (!std::isfinite(out.at(i, c))) {
        std::ostringstream os;
        os << g.info().id << ": " << what << " produced a non-finite coordinate at output point "
           << i << " (rule " << (i % 2) << ", window " << (i / 2) << "); degenerate input data";
        throw SchemeEvalError(os.str());
      }
}

}  // namespace

Chain subdivide_once(const GlueScheme& g, const Chain& p) {
  Chain out = subdivide_once_t(g, p);
  check_finite(out, g, "subdivision");
  return out;
}

Chain subdivide(const GlueScheme& g, const Chain& p, int rounds) {
  if (rounds < 0) throw DomainError("subdivide: rounds must be nonnegative");
  Chain cur = p;
  if (cur.size() < g.spread()) throw DomainError("subdivide: chain shorter than the spread");
  for (int r = 0; r < rounds; ++r) cur = subdivide_once(g, cur);
  return cur;
}

Chain window_map(const GlueScheme& g, int lambda, const Chain& p) {
  Chain out = window_map_t(g, lambda, p);
  check_finite(out, g, "window map");
  return out;
}

Chain compose_windows(const GlueScheme& g, const IndexVector& iv, const Chain& p) {
  Chain cur = p;
  for (int bit : iv) cur = window_map(g, bit, cur);
  return cur;
}

void validate_scheme(const GlueScheme& g) {
  const auto& in = g.info();
  const int n = in.n, d = in.dim;

  // fixed constants: g_lambda(s, ..., s) = s.  Rules that need distinct
  // points (circle fitting) may refuse exactly coincident data; that is the
  // documented degeneracy, not a violation.
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Chain cst(d, n);
    for (int c = 0; c < d; ++c) {
      const double s = (trial == 0) ? 0.0 : uni(rng) * 3.0;
      for (int i = 0; i < n; ++i) cst.at(i, c) = s;
    }
    try {
      Chain out = subdivide_once(g, cst);
      for (int i = 0; i < out.size(); ++i)
        for (int c = 0; c < d; ++c)
          if (std::abs(out.at(i, c) - cst.at(0, c)) > 1e-12)
            throw DomainError(in.id + ": constant chains are not reproduced");
    } catch (const SchemeEvalError&) {
      break;
    }
  }

  // halved equispacing with the declared shift:
  // subdivide(e) = (E_{n+1} + (m + tau) e) / 2
  {
    Chain e = standard_chain(n, d);
    Chain out = subdivide_once(g, e);
    if (out.size() != n + 1) throw DomainError(in.id + ": unexpected output length on e");
    for (int i = 0; i < out.size(); ++i) {
      const double want = 0.5 * ((i + 1) + in.m + in.tau);
      if (std::abs(out.at(i, 0) - want) > 1e-10)
        throw DomainError(in.id + ": equispaced chains are not halved with the declared shift");
      for (int c = 1; c < d; ++c)
        if (std::abs(out.at(i, c)) > 1e-10)
          throw DomainError(in.id + ": subdividing e left the first axis");
    }
  }

  // commutes with similarities on randomized windows
  for (int trial = 0; trial < 25; ++trial) {
    Chain p = standard_chain(n, d);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) p.at(i, c) += 0.15 * uni(rng);

    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) a(r, c) = uni(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::RowVectorXd shift(d);
    for (int c = 0; c < d; ++c) shift(c) = 2.0 * uni(rng);
    Similarity s(0.25 + 2.0 * std::abs(uni(rng)), q, shift);

    const Chain lhs = subdivide_once(g, apply_similarity(s, p));
    const Chain rhs = apply_similarity(s, subdivide_once(g, p));
    const double scale = 1.0 + seminorm(rhs, 0);
    for (int i = 0; i < lhs.size(); ++i)
      for (int c = 0; c < d; ++c)
        if (std::abs(lhs.at(i, c) - rhs.at(i, c)) > 1e-10 * scale)
          throw DomainError(in.id + ": rules do not commute with similarities");
  }
}

}  // namespace gluecert
