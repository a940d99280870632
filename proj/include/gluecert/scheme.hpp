#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gluecert/chain.hpp"
#include "gluecert/chain_ops.hpp"
#include "gluecert/dual.hpp"
#include "gluecert/interval.hpp"

namespace gluecert {

// Bits of an index vector [lambda_1, ..., lambda_ell]; lambda_1 acts first.
using IndexVector = std::vector<int>;

// code in [0, 2^ell): bit k-1 (LSB first) is lambda_k.
inline IndexVector index_vector_from_code(unsigned code, int ell) {
  IndexVector iv(ell);
  for (int k = 0; k < ell; ++k) iv[k] = (code >> k) & 1u;
  return iv;
}

// Binary subdivision scheme that commutes with similarities, works on local
// windows with one pair of rules everywhere, and halves the spacing of
// equispaced collinear chains.  Rules are evaluable over four scalar kinds
// through the overloaded virtuals; all evaluation is re-entrant.
class GlueScheme {
public:
  struct Info {
    std::string id;
    int dim = 2;
    int m = 1;              // rules use m+1 consecutive points
    int n = 3;              // spread, n = 2m+1
    double tau = 0.0;       // shift in [0,1)
    double nu = 1.0;        // rule smoothness exponent, used by verdicts
    bool linear = false;
  };

  virtual ~GlueScheme() = default;

  const Info& info() const { return info_; }
  int spread() const { return info_.n; }
  int dim() const { return info_.dim; }

  // Rule lambda evaluated on the m+1 points starting at index i0; writes the
  // d coordinates of the new point.
  virtual void eval_rule(int lambda, const ChainT<double>& c, int i0, std::span<double> out) const = 0;
  virtual void eval_rule(int lambda, const ChainT<Interval>& c, int i0, std::span<Interval> out) const = 0;
  virtual void eval_rule(int lambda, const ChainT<DDual>& c, int i0, std::span<DDual> out) const = 0;
  virtual void eval_rule(int lambda, const ChainT<IDual>& c, int i0, std::span<IDual> out) const = 0;

protected:
  explicit GlueScheme(Info info) : info_(std::move(info)) {
    if (info_.m < 1) throw DomainError("scheme needs m >= 1");
    if (info_.n != 2 * info_.m + 1) throw DomainError("spread must equal 2m+1");
    if (info_.tau < 0.0 || info_.tau >= 1.0) throw DomainError("shift must lie in [0,1)");
    if (info_.nu <= 0.0) throw DomainError("regularity parameter must be positive");
  }

private:
  Info info_;
};

// Adapter turning a single templated rule implementation into the four
// virtual instantiations.
template <class Impl>
class SchemeWith final : public GlueScheme {
public:
  SchemeWith(Info info, Impl impl) : GlueScheme(std::move(info)), impl_(std::move(impl)) {}

  void eval_rule(int l, const ChainT<double>& c, int i0, std::span<double> o) const override {
    impl_.eval(l, c, i0, o);
  }
  void eval_rule(int l, const ChainT<Interval>& c, int i0, std::span<Interval> o) const override {
    impl_.eval(l, c, i0, o);
  }
  void eval_rule(int l, const ChainT<DDual>& c, int i0, std::span<DDual> o) const override {
    impl_.eval(l, c, i0, o);
  }
  void eval_rule(int l, const ChainT<IDual>& c, int i0, std::span<IDual> o) const override {
    impl_.eval(l, c, i0, o);
  }

  const Impl& impl() const { return impl_; }

private:
  Impl impl_;
};

using SchemePtr = std::shared_ptr<const GlueScheme>;

// One subdivision step over any scalar kind: #out = 2 #P - n + 1.
template <class S>
ChainT<S> subdivide_once_t(const GlueScheme& g, const ChainT<S>& p) {
  const int n = g.spread(), m = g.info().m;
  if (p.dim() != g.dim()) throw DomainError("subdivide: chain dimension does not match scheme");
  if (p.size() < n) throw DomainError("subdivide: chain shorter than the spread");
  ChainT<S> out(p.dim(), 2 * p.size() - n + 1);
  for (int i = 0; i + m < p.size(); ++i) {
    g.eval_rule(0, p, i, out.point(2 * i));
    g.eval_rule(1, p, i, out.point(2 * i + 1));
  }
  return out;
}

// Plain-scalar subdivision with per-point diagnostics on rule failure.
Chain subdivide_once(const GlueScheme& g, const Chain& p);
Chain subdivide(const GlueScheme& g, const Chain& p, int rounds);

// The associated self-map on length-n windows: row r of the image is rule
// (r+lambda) mod 2 applied to the window starting at floor((r+lambda)/2).
template <class S>
ChainT<S> window_map_t(const GlueScheme& g, int lambda, const ChainT<S>& p) {
  const int n = g.spread();
  if (p.size() != n) throw DomainError("window_map: window must have exactly n points");
  if (lambda != 0 && lambda != 1) throw DomainError("window_map: lambda must be 0 or 1");
  ChainT<S> out(p.dim(), n);
  for (int r = 0; r < n; ++r) g.eval_rule((r + lambda) % 2, p, (r + lambda) / 2, out.point(r));
  return out;
}

Chain window_map(const GlueScheme& g, int lambda, const Chain& p);

template <class S>
ChainT<S> compose_windows_t(const GlueScheme& g, const IndexVector& iv, ChainT<S> p) {
  if (iv.empty()) throw DomainError("compose_windows: index vector must be nonempty");
  for (int bit : iv) p = window_map_t(g, bit, p);
  return p;
}

Chain compose_windows(const GlueScheme& g, const IndexVector& iv, const Chain& p);

// Construction-time checks: constants are fixed points, equispaced collinear
// chains subdivide to half spacing with the declared shift, and the rules
// commute with similarities on randomized data.
void validate_scheme(const GlueScheme& g);

}  // namespace gluecert
