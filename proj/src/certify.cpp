#include "gluecert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <set>

#include "gluecert/parallel.hpp"
#include "json.hpp"

namespace gluecert {

namespace {
bool debug_enabled() {
  static const bool on = std::getenv("GLUECERT_DEBUG") != nullptr;
  return on;
}
}  // namespace

// ---------------------------------------------------------------------------
// Jacobians

ChainT<DDual> seed_identity(const Chain& p) {
  const int n = p.size(), d = p.dim();
  const std::size_t nd = static_cast<std::size_t>(n) * d;
  ChainT<DDual> out(d, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c)
      out.at(i, c) = DDual::seeded(p.at(i, c), nd, static_cast<std::size_t>(i) * d + c, 1.0);
  return out;
}

ChainT<IDual> seed_identity_interval(const ChainT<Interval>& p) {
  const int n = p.size(), d = p.dim();
  const std::size_t nd = static_cast<std::size_t>(n) * d;
  ChainT<IDual> out(d, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c)
      out.at(i, c) = IDual::seeded(p.at(i, c), nd, static_cast<std::size_t>(i) * d + c, Interval(1.0));
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> window_jacobians(const GlueScheme& g, const Chain& at) {
  const int n = g.spread(), d = g.dim();
  if (at.size() != n || at.dim() != d) throw DomainError("window_jacobians: shape mismatch");
  const int nd = n * d;
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> out{Eigen::MatrixXd::Zero(nd, nd),
                                                  Eigen::MatrixXd::Zero(nd, nd)};
  const ChainT<DDual> seeded = seed_identity(at);
  for (int lambda = 0; lambda < 2; ++lambda) {
    ChainT<DDual> img = window_map_t(g, lambda, seeded);
    Eigen::MatrixXd& m = (lambda == 0) ? out.first : out.second;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) {
        const DDual& v = img.at(i, c);
        if (!std::isfinite(v.v)) throw SchemeEvalError(g.info().id + ": non-finite Jacobian value");
        for (int k = 0; k < nd; ++k) {
          const double pd = (k < static_cast<int>(v.dx.size())) ? v.dx[k] : 0.0;
          if (!std::isfinite(pd)) throw SchemeEvalError(g.info().id + ": non-finite Jacobian entry");
          m(i * d + c, k) = pd;
        }
      }
  }
  return out;
}

IntervalJacobian eval_with_jacobian(const GlueScheme& g, const IndexVector& iv,
                                    const ChainT<IDual>& seeded) {
  ChainT<IDual> cur = seeded;
  for (int bit : iv) cur = window_map_t(g, bit, cur);
  const int n = cur.size(), d = cur.dim();
  std::size_t ndirs = 0;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) ndirs = std::max(ndirs, cur.at(i, c).dx.size());
  IntervalJacobian out;
  out.value = ChainT<Interval>(d, n);
  out.jac = IMat(n * d, static_cast<int>(ndirs));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) {
      const IDual& v = cur.at(i, c);
      out.value.at(i, c) = v.v;
      for (std::size_t k = 0; k < ndirs; ++k)
        out.jac.at(i * d + c, static_cast<int>(k)) = (k < v.dx.size()) ? v.dx[k] : Interval(0.0);
    }
  return out;
}

DerivativePair tangent_normal(const GlueScheme& g) {
  const int n = g.spread(), d = g.dim();
  const Chain e = standard_chain(n, d);
  auto [m0, m1] = window_jacobians(g, e);
  DerivativePair out;
  out.a0 = Eigen::MatrixXd::Zero(n, n);
  out.a1 = Eigen::MatrixXd::Zero(n, n);
  out.b0 = Eigen::MatrixXd::Zero(n, n);
  out.b1 = Eigen::MatrixXd::Zero(n, n);
  const double tol = 1e-8;
  for (int lambda = 0; lambda < 2; ++lambda) {
    const Eigen::MatrixXd& m = (lambda == 0) ? m0 : m1;
    Eigen::MatrixXd& a = (lambda == 0) ? out.a0 : out.a1;
    Eigen::MatrixXd& b = (lambda == 0) ? out.b0 : out.b1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // block L^{i,j}: entry [c'][c] = m(i*d+c, j*d+c')
        for (int cp = 0; cp < d; ++cp)
          for (int c = 0; c < d; ++c) {
            const double v = m(i * d + c, j * d + cp);
            if (cp != c && std::abs(v) > tol)
              throw DomainError(g.info().id +
                                ": derivative blocks at e are not diagonal; not similarity-"
                                "equivariant or derivative propagation is broken");
            if (cp == c && cp >= 2 && std::abs(v - m(i * d + 1, j * d + 1)) > tol)
              throw DomainError(g.info().id + ": trailing diagonal entries of derivative blocks differ");
          }
        a(i, j) = m(i * d + 0, j * d + 0);
        b(i, j) = (d >= 2) ? m(i * d + 1, j * d + 1) : a(i, j);
      }
  }
  out.deviation = std::max((out.a0 - out.b0).cwiseAbs().maxCoeff(),
                           (out.a1 - out.b1).cwiseAbs().maxCoeff());
  out.locally_linear = out.deviation <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// zero-radius contraction bound (plain doubles)

namespace {

Eigen::MatrixXd flat_second_difference(int n, int d) {
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero((n - 2) * d, n * d);
  for (int i = 0; i < n - 2; ++i)
    for (int c = 0; c < d; ++c) {
      d2(i * d + c, i * d + c) = 1.0;
      d2(i * d + c, (i + 1) * d + c) = -2.0;
      d2(i * d + c, (i + 2) * d + c) = 1.0;
    }
  return d2;
}

Eigen::MatrixXd flat_k(int n, int d) {
  const Eigen::MatrixXd k = k_matrix(n);
  Eigen::MatrixXd kf = Eigen::MatrixXd::Zero(n * d, (n - 2) * d);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < n - 2; ++t)
      for (int c = 0; c < d; ++c) kf(i * d + c, t * d + c) = k(i, t);
  return kf;
}

}  // namespace

double gamma_star_zero_from_jacobians(const Eigen::MatrixXd& m0, const Eigen::MatrixXd& m1, int n,
                                      int d, int ell) {
  if (ell < 1 || ell > 12) throw DomainError("gamma_star_zero: depth must lie in [1, 12]");
  const Eigen::MatrixXd d2 = flat_second_difference(n, d);
  const Eigen::MatrixXd kf = flat_k(n, d);
  const double sd = std::sqrt(static_cast<double>(d));
  double best = 0.0;
  std::vector<Eigen::MatrixXd> stack(ell + 1);
  stack[0] = Eigen::MatrixXd::Identity(n * d, n * d);
  std::vector<int> bits(ell, 0);
  int depth = 0;
  while (true) {
    while (depth < ell) {
      stack[depth + 1] = (bits[depth] == 0 ? m0 : m1) * stack[depth];
      ++depth;
    }
    const Eigen::MatrixXd c = d2 * stack[ell] * kf;
    best = std::max(best, sd * c.cwiseAbs().rowwise().sum().maxCoeff());
    while (depth > 0 && bits[depth - 1] == 1) {
      bits[depth - 1] = 0;
      --depth;
    }
    if (depth == 0) break;
    bits[depth - 1] = 1;
    --depth;
  }
  return std::ldexp(best, ell);  // 2^ell * max bound(|M_Lambda|_2)
}

double gamma_star_zero(const GlueScheme& g, int ell) {
  const Chain e = standard_chain(g.spread(), g.dim());
  auto [m0, m1] = window_jacobians(g, e);
  return gamma_star_zero_from_jacobians(m0, m1, g.spread(), g.dim(), ell);
}

// ---------------------------------------------------------------------------
// branch-and-bound engine

namespace {

struct LeafStats {
  double num_hi = std::numeric_limits<double>::infinity();  // sqrt(d)*|Delta^2 J|_inf upper
  double den_lo = 0.0;                                      // |Pi g(q)|_1 lower
  double p2_hi = std::numeric_limits<double>::infinity();   // |g(q)|_2 upper
  // annulus mode: upper bound on kappa_k(q(u)) / |d(u)|_2 over the box
  double ratio_hi = std::numeric_limits<double>::infinity();
  bool undecidable = true;
};

double ratio_up(double num, double den) {
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return detail::step_up(num / den);
}

// Bounds compositions on a u-box by a first-order centered form: a thin
// center chain plus an interval enclosure A of the composite Jacobian (times
// K), rebuilt level by level through the chain rule with fresh one-level
// Jacobian enclosures.  Propagating raw interval chains through compositions
// instead compounds dependency exponentially in the depth, which bisection
// cannot repair at realistic budgets.
class BoundEngine {
public:
  // annulus_delta > 0 switches on the per-leaf distortion/radius ratio bound
  BoundEngine(const GlueScheme& g, int depth, double annulus_delta = 0.0)
      : g_(g),
        n_(g.spread()),
        d_(g.dim()),
        nd_((n_ - 2) * d_),
        depth_(depth),
        annulus_delta_(annulus_delta),
        k_(interval_k(n_)),
        pi_(interval_projection(n_)) {
    sqrt_d_hi_ = sqrt(Interval(static_cast<double>(d_))).hi;
    dpi_ = IMat(n_ - 1, n_);
    for (int i = 0; i < n_ - 1; ++i)
      for (int j = 0; j < n_; ++j) dpi_.at(i, j) = pi_.at(i + 1, j) - pi_.at(i, j);
    // a linear self-map has the window matrices as its constant Jacobian
    if (const auto* lin = dynamic_cast<const LinearGlueScheme*>(&g)) {
      auto [a0, a1] = lin->window_matrices();
      for (int lambda = 0; lambda < 2; ++lambda) {
        const Eigen::MatrixXd& m = (lambda == 0) ? a0 : a1;
        IMat j(n_ * d_, n_ * d_);
        for (int r = 0; r < n_; ++r)
          for (int cidx = 0; cidx < n_; ++cidx)
            for (int c = 0; c < d_; ++c) j.at(r * d_ + c, cidx * d_ + c) = Interval(m(r, cidx));
        const_jac_[lambda] = std::move(j);
      }
      has_const_jac_ = true;
    }
  }

  int ncoords() const { return nd_; }
  int nleaves() const { return 1 << depth_; }
  const IMat& k() const { return k_; }

  std::vector<LeafStats> eval_box(const UBox& box) const {
    std::vector<LeafStats> out(nleaves());
    BoxCtx ctx;
    ctx.rad.resize(nd_);
    for (int i = 0; i < nd_; ++i) ctx.rad[i] = box.c[i].rad();
    if (annulus_delta_ > 0.0) prepare_annulus_ctx(box, ctx);
    try {
      const ChainT<Interval> cc = embed_u_center(box, k_, n_, d_);
      // A_0 = K (per coordinate)
      IMat a(n_ * d_, nd_);
      for (int i = 0; i < n_; ++i)
        for (int t = 0; t < n_ - 2; ++t)
          for (int c = 0; c < d_; ++c) a.at(i * d_ + c, t * d_ + c) = k_.at(i, t);
      recurse(cc, a, 0, 0u, ctx, out);
    } catch (const BoxUndecidable&) {
      // leave everything undecidable
    }
    return out;
  }

private:
  struct BoxCtx {
    std::vector<double> rad;
    // annulus data: lower bounds on |d(u)|_2 over the box
    double d2lo = 0.0;                 // max_t lo ||u_t||
    double dbase = 0.0;                // affine lower bound, constant part
    int tstar = 0;                     // row carrying the affine bound
    std::vector<double> dl_up, dl_dn;  // per-coordinate corner contributions (lo)
  };

  // Affine lower bound on |d(u)|_2 = max_t ||u_t||: pick the row with the
  // largest center norm; by convexity ||a + x|| >= ||a|| + (a/||a||, x).
  void prepare_annulus_ctx(const UBox& box, BoxCtx& ctx) const {
    ctx.dl_up.assign(d_, 0.0);
    ctx.dl_dn.assign(d_, 0.0);
    double best = -1.0;
    std::vector<Interval> row(d_);
    for (int t = 0; t < n_ - 2; ++t) {
      for (int c = 0; c < d_; ++c) row[c] = box.c[static_cast<std::size_t>(t) * d_ + c];
      const Interval nrm = point_norm(std::span<const Interval>(row.data(), d_));
      ctx.d2lo = std::max(ctx.d2lo, nrm.lo);
      double cn = 0.0;
      for (int c = 0; c < d_; ++c) cn += sqr(row[c].mid());
      cn = std::sqrt(cn);
      if (cn > best) {
        best = cn;
        ctx.tstar = t;
      }
    }
    for (int c = 0; c < d_; ++c) row[c] = Interval(box.c[static_cast<std::size_t>(ctx.tstar) * d_ + c].mid());
    const Interval na = point_norm(std::span<const Interval>(row.data(), d_));
    if (na.lo > 1e-300) {
      ctx.dbase = na.lo;
      for (int c = 0; c < d_; ++c) {
        const Interval ahat = row[c] / na;
        const double radk = ctx.rad[static_cast<std::size_t>(ctx.tstar) * d_ + c];
        ctx.dl_up[c] = (ahat * radk).lo;
        ctx.dl_dn[c] = (ahat * -radk).lo;
      }
    }
  }

  // One-level Jacobian enclosure of the window map.  Derivatives of
  // similarity-equivariant maps are unchanged by scaling and translation, so
  // the window is re-anchored at its center point and rescaled to unit
  // spacing before evaluation.  The anchored deviations come from exact
  // differences of the affine part, which removes the common-translation
  // dependency that plain interval subtraction cannot cancel.
  IMat one_level_jacobian(int lambda, const ChainT<Interval>& cc, const IMat& a,
                          const std::vector<double>& rad, double scale) const {
    if (has_const_jac_) return const_jac_[lambda];
    const int mid = n_ / 2;
    ChainT<IDual> seeded(d_, n_);
    for (int i = 0; i < n_; ++i)
      for (int c = 0; c < d_; ++c) {
        Interval val = (cc.at(i, c) - cc.at(mid, c)) * scale;
        for (int k = 0; k < nd_; ++k) {
          const Interval dif = (a.at(i * d_ + c, k) - a.at(mid * d_ + c, k)) * scale;
          val = val + dif * Interval(-rad[k], rad[k]);
        }
        seeded.at(i, c) =
            IDual::seeded(val, static_cast<std::size_t>(n_) * d_,
                          static_cast<std::size_t>(i) * d_ + c, Interval(1.0));
      }
    const ChainT<IDual> img = window_map_t(g_, lambda, seeded);
    IMat j(n_ * d_, n_ * d_);
    for (int i = 0; i < n_; ++i)
      for (int c = 0; c < d_; ++c) {
        const IDual& v = img.at(i, c);
        for (int k = 0; k < n_ * d_; ++k)
          j.at(i * d_ + c, k) = k < static_cast<int>(v.dx.size()) ? v.dx[k] : Interval(0.0);
      }
    return j;
  }

  void recurse(const ChainT<Interval>& cc, const IMat& a, int dep, unsigned code,
               const BoxCtx& ctx, std::vector<LeafStats>& out) const {
    if (dep == depth_) {
      out[code] = leaf(cc, a, ctx);
      return;
    }
    const double scale = std::ldexp(1.0, dep);
    for (unsigned bit = 0; bit < 2; ++bit) {
      try {
        const IMat j = one_level_jacobian(static_cast<int>(bit), cc, a, ctx.rad, scale);
        const IMat a2 = imat_mul(j, a);
        const ChainT<Interval> cc2 = window_map_t(g_, static_cast<int>(bit), cc);
        recurse(cc2, a2, dep + 1, code | (bit << dep), ctx, out);
      } catch (const BoxUndecidable&) {
        // all leaves below this prefix stay undecidable
      }
    }
  }

  LeafStats leaf(const ChainT<Interval>& cc, const IMat& a, const BoxCtx& ctx) const {
    LeafStats s;
    const int n = n_, d = d_, nd = nd_;
    const std::vector<double>& rad = ctx.rad;
    const int npts = n - 2;

    // second-difference rows of the Jacobian: operator row sums and
    // radius-weighted deviations (mean value form)
    double max_oprow = 0.0, max_p2 = 0.0;
    std::vector<Interval> cen2(static_cast<std::size_t>(npts) * d), devn(d);
    std::vector<Interval> rows(static_cast<std::size_t>(npts) * d * nd);
    std::vector<double> pt_hi(npts);
    for (int i = 0; i < npts; ++i) {
      for (int c = 0; c < d; ++c) {
        Interval opsum(0.0), dev(0.0);
        for (int k = 0; k < nd; ++k) {
          const Interval j2 =
              a.at(i * d + c, k) - 2.0 * a.at((i + 1) * d + c, k) + a.at((i + 2) * d + c, k);
          rows[(static_cast<std::size_t>(i) * d + c) * nd + k] = j2;
          const Interval ab = abs(j2);
          opsum = opsum + ab;
          dev = dev + ab * rad[k];
        }
        max_oprow = std::max(max_oprow, opsum.hi);
        devn[c] = Interval(0.0, dev.hi);
        cen2[static_cast<std::size_t>(i) * d + c] =
            cc.at(i, c) - 2.0 * cc.at(i + 1, c) + cc.at(i + 2, c);
      }
      const double center_hi =
          point_norm(std::span<const Interval>(cen2.data() + static_cast<std::size_t>(i) * d, d)).hi;
      const double dev_hi = point_norm(std::span<const Interval>(devn.data(), d)).hi;
      pt_hi[i] = detail::step_up(center_hi + dev_hi);
      max_p2 = std::max(max_p2, pt_hi[i]);
    }
    s.num_hi = detail::step_up(sqrt_d_hi_ * max_oprow);
    s.p2_hi = max_p2;

    // lower bound on |Pi g(q)|_1: per difference point, the center norm minus
    // the mean-value radius of the (Delta Pi A) row
    double den = 0.0;
    std::vector<Interval> ycen(d), yrad(d);
    for (int i = 0; i + 1 < n; ++i) {
      for (int c = 0; c < d; ++c) {
        Interval cen(0.0);
        for (int j = 0; j < n; ++j) cen = cen + dpi_.at(i, j) * cc.at(j, c);
        ycen[c] = cen;
        Interval dev(0.0);
        for (int k = 0; k < nd; ++k) {
          Interval entry(0.0);
          for (int j = 0; j < n; ++j) entry = entry + dpi_.at(i, j) * a.at(j * d + c, k);
          dev = dev + abs(entry) * rad[k];
        }
        yrad[c] = Interval(0.0, dev.hi);
      }
      const double cen_lo = point_norm(std::span<const Interval>(ycen.data(), d)).lo;
      const double rad_hi = point_norm(std::span<const Interval>(yrad.data(), d)).hi;
      den = std::max(den, detail::step_down(cen_lo - rad_hi));
    }
    s.den_lo = std::max(0.0, den);
    s.undecidable = false;
    if (annulus_delta_ > 0.0)
      s.ratio_hi = annulus_ratio(cen2, rows, pt_hi, s.den_lo, s.p2_hi, ctx);
    return s;
  }

  // Upper bound on kappa(leaf window) / |d(u)|_2 over the box.  The
  // decoupled form divides the worst distortion by the smallest radius; the
  // corner form keeps their common linear dependence on u: the numerator
  // points get affine upper bounds ||a|| + (a/||a||, Mx) + |Mx|^2/(2||a||),
  // the radius the convexity lower bound, and the linear-fractional quotient
  // is maximized over the box corners.
  double annulus_ratio(const std::vector<Interval>& cen2, const std::vector<Interval>& rows,
                       const std::vector<double>& pt_hi, double den_lo, double p2_hi,
                       const BoxCtx& ctx) const {
    const double dfloor = std::max(annulus_delta_, ctx.d2lo);
    const double decoupled = ratio_up(ratio_up(p2_hi, den_lo), dfloor);
    const int nd = nd_, d = d_;
    const int npts = n_ - 2;
    if (nd > 12 || den_lo <= 0.0) return decoupled;

    // per point: constant part, signed corner contributions, curvature slack
    std::vector<double> base(npts), up(static_cast<std::size_t>(npts) * nd),
        dn(static_cast<std::size_t>(npts) * nd);
    std::vector<bool> affine(npts);
    for (int i = 0; i < npts; ++i) {
      const Interval na =
          point_norm(std::span<const Interval>(cen2.data() + static_cast<std::size_t>(i) * d, d));
      // the quadratic remainder needs a norm bounded away from zero
      double colsum = 0.0;
      std::vector<Interval> col(d);
      for (int k = 0; k < nd; ++k) {
        for (int c = 0; c < d; ++c) col[c] = rows[(static_cast<std::size_t>(i) * d + c) * nd + k];
        colsum = detail::step_up(colsum +
                                 (point_norm(std::span<const Interval>(col.data(), d)) * ctx.rad[k]).hi);
      }
      if (!(na.lo > 0.5 * colsum) || na.lo <= 1e-300) {
        affine[i] = false;  // fall back to the constant decoupled bound
        base[i] = pt_hi[i];
        continue;
      }
      affine[i] = true;
      const Interval quad = sqr(Interval(0.0, colsum)) / (2.0 * Interval(na.lo));
      base[i] = detail::step_up(na.hi + quad.hi);
      for (int k = 0; k < nd; ++k) {
        Interval sik(0.0);
        for (int c = 0; c < d; ++c)
          sik = sik + (cen2[static_cast<std::size_t>(i) * d + c] / na) *
                          rows[(static_cast<std::size_t>(i) * d + c) * nd + k];
        up[static_cast<std::size_t>(i) * nd + k] = (sik * ctx.rad[k]).hi;
        dn[static_cast<std::size_t>(i) * nd + k] = (sik * -ctx.rad[k]).hi;
      }
    }

    // The numerator bound is a max of affine functions (convex) and the
    // radius bound is affine; their quotient is quasiconvex wherever the
    // affine denominator stays positive, so the box maximum sits at a
    // corner.  When the affine radius bound loses positivity the decoupled
    // bound is the only sound one.
    const double fuzz = 1.0 + 64.0 * detail::kUlpScale * nd;  // corner-sum rounding
    double worst = 0.0, gmin = std::numeric_limits<double>::infinity();
    const unsigned corners = 1u << nd;
    for (unsigned mask = 0; mask < corners; ++mask) {
      double num = 0.0;
      for (int i = 0; i < npts; ++i) {
        double v = base[i];
        if (affine[i]) {
          const double* u = up.data() + static_cast<std::size_t>(i) * nd;
          const double* dncoef = dn.data() + static_cast<std::size_t>(i) * nd;
          for (int k = 0; k < nd; ++k) v += (mask >> k & 1u) ? u[k] : dncoef[k];
        }
        num = std::max(num, v);
      }
      double g = ctx.dbase;
      for (int c = 0; c < d; ++c) {
        const int k = ctx.tstar * d + c;
        g += (mask >> k & 1u) ? ctx.dl_up[c] : ctx.dl_dn[c];
      }
      gmin = std::min(gmin, g);
      if (g <= 1e-300) return decoupled;
      worst = std::max(worst, num * fuzz / (g / fuzz));
    }
    if (!(gmin > 0.0)) return decoupled;
    const double coupled = ratio_up(detail::step_up(worst), den_lo);
    return std::min(decoupled, coupled);
  }

  const GlueScheme& g_;
  int n_, d_, nd_, depth_;
  double annulus_delta_ = 0.0;
  IMat k_, pi_, dpi_;
  IMat const_jac_[2];
  bool has_const_jac_ = false;
  double sqrt_d_hi_;
};

struct LeafRecord {
  UBox box;
  std::vector<LeafStats> stats;
  bool evaluated = false;
};

}  // namespace

BoundResult gamma_star_delta(const GlueScheme& g, int ell, double delta, const BnbOptions& opt) {
  if (ell < 1 || ell > 12) throw DomainError("gamma_star_delta: depth must lie in [1, 12]");
  if (!(delta > 0.0)) throw DomainError("gamma_star_delta: delta must be positive");
  const BoundEngine eng(g, ell);
  const int nl = eng.nleaves();

  std::vector<LeafRecord> leaves;
  leaves.push_back({UBox::cube(eng.ncoords(), delta), {}, false});

  BoundResult res;
  long evals = 0;
  int polish_left = opt.polish_rounds;
  double prev_bound = std::numeric_limits<double>::infinity();

  while (true) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (!leaves[i].evaluated) todo.push_back(i);
    parallel_for(todo.size(), opt.threads, [&](std::size_t t) {
      leaves[todo[t]].stats = eng.eval_box(leaves[todo[t]].box);
      leaves[todo[t]].evaluated = true;
    });
    evals += static_cast<long>(todo.size());

    // decoupled aggregation: per index vector, max numerator / min denominator
    double bound = 0.0;
    std::set<std::size_t> to_split;
    for (int L = 0; L < nl; ++L) {
      double num = 0.0, den = std::numeric_limits<double>::infinity();
      std::size_t arg_num = 0, arg_den = 0;
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        const LeafStats& st = leaves[i].stats[L];
        const double nh = st.undecidable ? std::numeric_limits<double>::infinity() : st.num_hi;
        const double dl = st.undecidable ? 0.0 : st.den_lo;
        if (nh > num) {
          num = nh;
          arg_num = i;
        }
        if (dl < den) {
          den = dl;
          arg_den = i;
        }
      }
      const double r = ratio_up(num, den);
      bound = std::max(bound, r);
      if (r > opt.target || !std::isfinite(r)) {
        to_split.insert(arg_num);
        to_split.insert(arg_den);
      }
    }

    res.bound = bound;
    res.boxes = evals;
    if (bound <= opt.target) {
      if (polish_left > 0 && evals < opt.max_boxes &&
          (!std::isfinite(prev_bound) || bound < prev_bound * 0.9975)) {
        --polish_left;
        prev_bound = bound;
        // keep sharpening the binding leaves
        to_split.clear();
        for (int L = 0; L < nl; ++L) {
          double num = 0.0, den = std::numeric_limits<double>::infinity();
          std::size_t arg_num = 0, arg_den = 0;
          for (std::size_t i = 0; i < leaves.size(); ++i) {
            const LeafStats& st = leaves[i].stats[L];
            if (!st.undecidable && st.num_hi > num) {
              num = st.num_hi;
              arg_num = i;
            }
            if (!st.undecidable && st.den_lo < den) {
              den = st.den_lo;
              arg_den = i;
            }
          }
          if (ratio_up(num, den) > bound * 0.98) {
            to_split.insert(arg_num);
            to_split.insert(arg_den);
          }
        }
      } else {
        res.ok = true;
        res.unresolved = 0.0;
        return res;
      }
    }
    if (evals >= opt.max_boxes) {
      res.ok = bound <= opt.target;
      if (res.ok) res.unresolved = 0.0;
      return res;
    }

    // split; drop leaves too thin to refine
    bool any = false;
    std::vector<LeafRecord> next;
    next.reserve(leaves.size() + to_split.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (to_split.count(i) && leaves[i].box.c[leaves[i].box.widest_coord()].width() > opt.min_width) {
        auto [a, b] = leaves[i].box.split();
        next.push_back({std::move(a), {}, false});
        next.push_back({std::move(b), {}, false});
        any = true;
      } else {
        next.push_back(std::move(leaves[i]));
      }
    }
    if (!any) {  // nothing refinable: report the bound we have
      res.ok = res.bound <= opt.target;
      return res;
    }
    leaves = std::move(next);
  }
}

BoundResult gamma_annulus(const GlueScheme& g, int k, double delta, double gamma,
                          const BnbOptions& opt) {
  if (k < 1 || k > 12) throw DomainError("gamma_annulus: depth must lie in [1, 12]");
  if (!(0.0 < delta && delta < gamma)) throw DomainError("gamma_annulus requires 0 < delta < gamma");
  const BoundEngine eng(g, k, delta);
  const int nl = eng.nleaves();
  const int d = g.dim();
  const int nrows = g.spread() - 2;

  auto row_norm = [&](const UBox& b, int t) {
    return point_norm(std::span<const Interval>(b.c.data() + static_cast<std::size_t>(t) * d,
                                                static_cast<std::size_t>(d)));
  };

  struct Rec {
    UBox box;
    double ratio = std::numeric_limits<double>::infinity();
    bool evaluated = false;
    bool dropped = false;
  };
  std::vector<Rec> leaves;
  leaves.push_back({UBox::cube(eng.ncoords(), gamma), 0.0, false, false});

  BoundResult res;
  long evals = 0;
  while (true) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (!leaves[i].evaluated) todo.push_back(i);
    parallel_for(todo.size(), opt.threads, [&](std::size_t t) {
      Rec& r = leaves[todo[t]];
      r.evaluated = true;
      // inside the inner ball, or outside the outer one: not part of the annulus
      bool inside = true, outside = false;
      for (int row = 0; row < nrows; ++row) {
        const Interval nrm = row_norm(r.box, row);
        if (nrm.hi >= delta) inside = false;
        if (nrm.lo > gamma) outside = true;
      }
      if (inside || outside) {
        r.dropped = true;
        r.ratio = 0.0;
        return;
      }
      const std::vector<LeafStats> stats = eng.eval_box(r.box);
      double worst = 0.0;
      for (int L = 0; L < nl; ++L) {
        const LeafStats& st = stats[L];
        worst = std::max(worst,
                         st.undecidable ? std::numeric_limits<double>::infinity() : st.ratio_hi);
      }
      r.ratio = worst;
    });
    evals += static_cast<long>(todo.size());

    double bound = 0.0;
    long failing = 0;
    for (const Rec& r : leaves)
      if (!r.dropped) {
        bound = std::max(bound, r.ratio);
        if (r.ratio > opt.target) ++failing;
      }
    res.bound = bound;
    res.boxes = evals;
    if (debug_enabled())
      std::cerr << "[annulus] evals=" << evals << " leaves=" << leaves.size()
                << " failing=" << failing << " bound=" << bound << "\n";
    if (bound <= opt.target) {
      res.ok = true;
      return res;
    }
    if (evals >= opt.max_boxes) return res;

    std::vector<Rec> next;
    bool any = false;
    double stuck_volume = 0.0;
    for (auto& r : leaves) {
      if (r.dropped) continue;
      if (r.ratio > opt.target) {
        if (r.box.c[r.box.widest_coord()].width() > opt.min_width) {
          auto [a, b] = r.box.split();
          next.push_back({std::move(a), 0.0, false, false});
          next.push_back({std::move(b), 0.0, false, false});
          any = true;
        } else {
          stuck_volume += r.box.volume();
          next.push_back(std::move(r));
        }
      } else {
        next.push_back(std::move(r));
      }
    }
    if (!any) {
      res.unresolved = stuck_volume / UBox::cube(eng.ncoords(), gamma).volume();
      return res;
    }
    leaves = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// certificate search

CertifyOutcome certify_rate(const GlueScheme& g, const CertifySearch& cfg) {
  CertifyOutcome out;
  long used = 0;
  BnbOptions opt;
  opt.max_boxes = cfg.box_budget;
  opt.target = cfg.target;
  opt.polish_rounds = cfg.polish_rounds;
  opt.threads = cfg.threads;

  double best_alpha = 0.0;
  double best_delta = 0.0, best_bound = 1.0;
  int best_ell = 0;

  for (int ell : cfg.ells) {
    for (double delta : cfg.delta_grid) {
      if (used >= cfg.total_budget) break;
      opt.max_boxes = std::min(cfg.box_budget, cfg.total_budget - used);
      const BoundResult r = gamma_star_delta(g, ell, delta, opt);
      used += r.boxes;
      if (r.bound < out.best_inner_bound) {
        out.best_inner_bound = r.bound;
        out.best_ell = ell;
        out.best_delta = delta;
      }
      if (r.ok && r.bound < 1.0) {
        const double alpha = std::min(1.0, -std::log2(r.bound) / ell);
        if (alpha > best_alpha) {
          best_alpha = alpha;
          best_delta = delta;
          best_bound = r.bound;
          best_ell = ell;
        }
      }
    }
  }
  out.boxes_used = used;
  if (best_alpha <= 0.0) {
    out.note = "no contraction bound below 1 within the configured budget";
    return out;
  }

  Certificate cert;
  cert.scheme_id = g.info().id;
  cert.dim = g.dim();
  cert.delta = best_delta;
  cert.gamma = best_delta;
  cert.ell = best_ell;
  cert.k = 0;
  cert.bound = best_bound;
  cert.alpha = best_alpha;

  // outer phase: grow gamma while the annulus bound stays below 1
  BnbOptions aopt = opt;
  aopt.target = cfg.annulus_target;
  for (int step = 0; step < cfg.gamma_steps && used < cfg.total_budget; ++step) {
    const double frac = static_cast<double>(step) / cfg.gamma_steps;
    const double gamma = cfg.gamma_max * std::pow(best_delta / cfg.gamma_max, frac);
    if (gamma <= best_delta) break;
    bool done = false;
    for (int k = 1; k <= cfg.k_max && used < cfg.total_budget; ++k) {
      aopt.max_boxes = std::min(cfg.box_budget, cfg.total_budget - used);
      const BoundResult r = gamma_annulus(g, k, best_delta, gamma, aopt);
      used += r.boxes;
      if (r.ok && r.bound < 1.0) {
        cert.gamma = gamma;
        cert.k = k;
        cert.annulus_bound = r.bound;
        done = true;
        break;
      }
    }
    if (done) break;
  }
  cert.boxes_used = used;
  out.boxes_used = used;
  out.cert = cert;
  return out;
}

// ---------------------------------------------------------------------------
// chain checks and verdicts

const char* level_name(Verdict::Level level) {
  switch (level) {
    case Verdict::Level::unknown: return "unknown";
    case Verdict::Level::convergent: return "convergent";
    case Verdict::Level::c1: return "C1";
    case Verdict::Level::c1_alpha: return "C1_alpha";
    case Verdict::Level::almost_c2: return "almost_C2";
  }
  return "unknown";
}

Verdict check_chain(const GlueScheme& g, const Certificate& cert, const Chain& p, int max_rounds) {
  if (cert.scheme_id != g.info().id)
    throw DomainError("certificate was computed for scheme '" + cert.scheme_id + "', not '" +
                      g.info().id + "'");
  if (p.size() < g.spread()) throw DomainError("check_chain: chain shorter than the spread");
  Verdict v;
  Chain cur = p;
  for (int round = 0; round <= max_rounds; ++round) {
    ExtendedReal kap(0.0);
    try {
      kap = kappa_chain(cur, g.spread());
    } catch (const SchemeEvalError& e) {
      v.note = e.what();
      return v;
    }
    if (!kap.is_infinite() && kap.value() <= cert.gamma) {
      v.level = Verdict::Level::c1_alpha;
      v.alpha = cert.alpha;
      v.certified_round = round;
      v.kappa_at_round = kap.value();
      v.reasons.push_back({"kappa_at_round", kap.value(),
                           "distortion entered the certified neighborhood (<= gamma)"});
      v.reasons.push_back({"gamma", cert.gamma, "outer radius of the certificate"});
      v.reasons.push_back({"contraction_bound", cert.bound,
                           "certified depth-" + std::to_string(cert.ell) +
                               " contraction of relative distortion below 1"});
      if (cert.k > 0)
        v.reasons.push_back({"annulus_bound", cert.annulus_bound,
                             "certified decay from the annulus into the inner radius"});
      v.reasons.push_back(
          {"alpha", cert.alpha, "straightening at rate alpha implies a C^{1,alpha} limit"});
      return v;
    }
    if (round == max_rounds) break;
    try {
      cur = subdivide_once(g, cur);
    } catch (const SchemeEvalError& e) {
      v.note = e.what();
      return v;
    }
  }
  v.note = "distortion did not reach the certified neighborhood within " +
           std::to_string(max_rounds) + " rounds; no conclusion";
  return v;
}

namespace {

CompanionAnalysis::OrderInfo jsr_orders(const LinearGlueScheme& s, int order, int ell_max) {
  CompanionAnalysis::OrderInfo info;
  info.order = order;
  try {
    const DifferenceScheme ds = difference_scheme(s, order);
    info.exists = true;
    for (int ell = 1; ell <= ell_max; ++ell) {
      const double rho = jsr_upper(ds.b0, ds.b1, ell);
      info.rho_by_ell.push_back(rho);
      info.rho_best = std::min(info.rho_best, rho);
    }
  } catch (const DomainError&) {
    info.exists = false;
  }
  return info;
}

std::shared_ptr<LinearGlueScheme> scheme_from_window_matrix(const GlueScheme& g,
                                                            const Eigen::MatrixXd& a0,
                                                            const Eigen::MatrixXd& a1,
                                                            const std::string& tag) {
  const int m = g.info().m;
  Eigen::MatrixXd w(2, m + 1);
  for (int c = 0; c <= m; ++c) {
    w(0, c) = a0(0, c);
    w(1, c) = a1(0, c);
  }
  GlueScheme::Info in = g.info();
  in.id = g.info().id + tag;
  in.linear = true;
  in.dim = 1;
  auto s = std::make_shared<LinearGlueScheme>(in, w);
  // the interleave of the extracted rules must reproduce the Jacobian
  auto [c0, c1] = s->window_matrices();
  if ((c0 - a0).cwiseAbs().maxCoeff() > 1e-7 || (c1 - a1).cwiseAbs().maxCoeff() > 1e-7)
    throw DomainError(g.info().id + ": derivative at e is not a windowed scheme structure");
  return s;
}

}  // namespace

CompanionAnalysis analyze_companion(const GlueScheme& g, int ell_max) {
  CompanionAnalysis out;
  out.pair = tangent_normal(g);
  auto a = scheme_from_window_matrix(g, out.pair.a0, out.pair.a1, ":tangential");
  out.a_rules = a->weights();
  std::shared_ptr<LinearGlueScheme> b = a;
  if (!out.pair.locally_linear) {
    b = scheme_from_window_matrix(g, out.pair.b0, out.pair.b1, ":normal");
  }
  out.b_rules = b->weights();
  for (int order = 2; order <= 4; ++order) {
    out.a_orders.push_back(jsr_orders(*a, order, ell_max));
    out.b_orders.push_back(jsr_orders(*b, order, ell_max));
  }

  const auto& a2 = out.a_orders[0];
  const auto& b2 = out.b_orders[0];
  if (a2.exists && b2.exists) {
    const double mu = std::max(a2.rho_best, b2.rho_best);
    const double alpha = -std::log2(mu) - 1.0;
    out.c1_alpha = std::clamp(alpha, 0.0, 1.0);
  }
  // second order: from the order-3 bound directly, or any positive order-4
  // exponent (a C^3 scheme is Lipschitz in its second derivative)
  double c2 = 0.0;
  const auto& a3 = out.a_orders[1];
  const auto& a4 = out.a_orders[2];
  if (a3.exists) c2 = std::max(c2, std::clamp(-std::log2(a3.rho_best) - 2.0, 0.0, 1.0));
  if (a4.exists && -std::log2(a4.rho_best) - 3.0 > 0.0) c2 = 1.0;
  out.c2_alpha = c2;
  return out;
}

Verdict regularity_verdict(const GlueScheme& g, const Certificate* cert,
                           const CompanionAnalysis* companion, const Verdict* chain_result,
                           bool premise_straightened) {
  Verdict v;
  const bool straightened =
      premise_straightened || (chain_result && chain_result->level != Verdict::Level::unknown);
  if (chain_result) v = *chain_result;

  if (!straightened) {
    v.level = Verdict::Level::unknown;
    if (v.note.empty()) v.note = "straightening not established for this chain";
    return v;
  }
  if (cert && v.level == Verdict::Level::unknown) {
    v.level = Verdict::Level::c1_alpha;
    v.alpha = cert->alpha;
    v.reasons.push_back({"alpha", cert->alpha, "straightening at rate alpha (assumed premise)"});
  }

  if (companion) {
    if (companion->pair.locally_linear && companion->c2_alpha > 0.0) {
      const double beta = std::min(companion->c2_alpha, g.info().nu);
      v.level = Verdict::Level::almost_c2;
      v.alpha = beta;
      v.reasons.push_back({"companion_deviation", companion->pair.deviation,
                           "tangential and normal derivative schemes coincide (locally linear)"});
      v.reasons.push_back({"companion_c2_alpha", companion->c2_alpha,
                           "joint-spectral-radius bound on the companion's third differences"});
      v.reasons.push_back({"nu", g.info().nu, "rule smoothness exponent caps the inherited order"});
      v.reasons.push_back({"beta", beta, "almost C^{2,beta} with beta = min(alpha_companion, nu)"});
    } else if (companion->c1_alpha > 0.0) {
      v.reasons.push_back({"companion_c1_alpha", companion->c1_alpha,
                           "worse of the tangential/normal schemes is almost C^{1,alpha}"});
      if (v.level == Verdict::Level::unknown) {
        v.level = Verdict::Level::c1_alpha;
        v.alpha = companion->c1_alpha;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// JSON

std::string certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["scheme"] = c.scheme_id;
  j["dim"] = c.dim;
  j["delta"] = c.delta;
  j["gamma"] = c.gamma;
  j["ell"] = c.ell;
  j["k"] = c.k;
  j["bound"] = c.bound;
  if (c.k > 0) j["annulus_bound"] = c.annulus_bound;
  j["alpha"] = c.alpha;
  j["boxes_used"] = c.boxes_used;
  j["unresolved_volume"] = c.unresolved;
  return j.dump(2);
}

Certificate certificate_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw DomainError(std::string("certificate parse error: ") + e.what());
  }
  Certificate c;
  try {
    c.scheme_id = j.at("scheme").get<std::string>();
    c.dim = j.at("dim").get<int>();
    c.delta = j.at("delta").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.ell = j.at("ell").get<int>();
    c.k = j.at("k").get<int>();
    c.bound = j.at("bound").get<double>();
    c.alpha = j.at("alpha").get<double>();
    if (j.contains("annulus_bound")) c.annulus_bound = j["annulus_bound"].get<double>();
    c.boxes_used = j.value("boxes_used", 0L);
    c.unresolved = j.value("unresolved_volume", 0.0);
  } catch (const std::exception& e) {
    throw DomainError(std::string("certificate field error: ") + e.what());
  }
  if (!(c.bound < 1.0) || !(c.alpha > 0.0) || !(c.delta > 0.0) || c.gamma < c.delta)
    throw DomainError("certificate violates its invariants (bound < 1, alpha > 0, delta <= gamma)");
  return c;
}

std::string verdict_to_json(const Verdict& v, const std::string& scheme_id) {
  nlohmann::json j;
  j["scheme"] = scheme_id;
  j["level"] = level_name(v.level);
  if (v.level == Verdict::Level::c1_alpha || v.level == Verdict::Level::almost_c2)
    j["alpha"] = v.alpha;
  if (v.certified_round >= 0) {
    j["certified_round"] = v.certified_round;
    j["kappa_at_round"] = v.kappa_at_round;
  }
  if (!v.note.empty()) j["note"] = v.note;
  nlohmann::json reasons = nlohmann::json::array();
  for (const auto& r : v.reasons) reasons.push_back({{"name", r.name}, {"value", r.value}, {"rule", r.rule}});
  j["justification"] = reasons;
  return j.dump(2);
}

}  // namespace gluecert
