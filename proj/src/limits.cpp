#include "gluecert/limits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gluecert/chain_ops.hpp"
#include "gluecert/difference.hpp"

namespace gluecert {

namespace {

// Cardinal B-spline of degree p with knots 0..p+1 (Cox-de Boor).
double cardinal_bspline(int p, double x) {
  if (x <= 0.0 || x >= p + 1.0) return 0.0;
  if (p == 0) return 1.0;
  return (x * cardinal_bspline(p - 1, x) + (p + 1.0 - x) * cardinal_bspline(p - 1, x - 1.0)) / p;
}

}  // namespace

Generator hat_generator() {
  Generator g;
  g.name = "hat";
  g.support_lo = -1.0;
  g.support_hi = 1.0;
  g.lebesgue = 1.0;
  g.phi = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
  return g;
}

Generator bspline_generator(int degree, double shift) {
  Generator g;
  g.name = "bspline" + std::to_string(degree);
  g.support_lo = -shift;
  g.support_hi = degree + 1.0 - shift;
  g.lebesgue = 1.0;  // nonnegative partition of unity
  g.phi = [degree, shift](double x) { return cardinal_bspline(degree, x + shift); };
  return g;
}

std::optional<Generator> basic_generator(const LinearGlueScheme& s) {
  const LaurentMask mask = scheme_symbol(s);
  const int len = static_cast<int>(mask.c.size());
  const int p = len - 2;  // binomial mask of a degree-p spline has p+2 entries
  if (p < 1) return std::nullopt;
  double scale = std::ldexp(1.0, -p);
  for (int k = 0; k < len; ++k) {
    double binom = 1.0;
    for (int i = 0; i < k; ++i) binom = binom * (len - 1 - i) / (i + 1);
    if (std::abs(mask.c(k) - scale * binom) > 1e-12) return std::nullopt;
  }
  // refinement alignment: phi(y) = sum_t c_t phi(2y - t) with t from t_min,
  // solved by the cardinal spline shifted by -t_min/2
  return bspline_generator(p, -mask.t0 / 2.0);
}

int min_level_for(const Generator& gen, double z) {
  if (!(z > 0.0)) throw DomainError("margin z must be positive");
  int level = 0;
  while (std::ldexp(gen.support_radius(), -level) > z) {
    ++level;
    if (level > 60) throw DomainError("margin z too small for any practical level");
  }
  return level;
}

SampledCurve limit_samples(const GlueScheme& g, const Chain& p, int level, const Generator& gen,
                           double z, int samples) {
  const int min_level = min_level_for(gen, z);
  if (level < min_level)
    throw DomainError("level " + std::to_string(level) + " too small for margin z; need at least " +
                      std::to_string(min_level));
  if (samples < 2) throw DomainError("need at least 2 samples");
  const double hi = p.size() - g.spread() + 1 - z;
  if (hi <= z) throw DomainError("margin z leaves an empty parameter interval");

  const Chain pl = subdivide(g, p, level);
  SampledCurve out;
  out.level = level;
  out.points = Chain(p.dim(), samples);
  out.t.resize(samples);
  const double scale = std::ldexp(1.0, level);
  for (int s = 0; s < samples; ++s) {
    const double t = z + (hi - z) * s / (samples - 1);
    out.t[s] = t;
    const double x = scale * t;
    const int j0 = std::max(0, static_cast<int>(std::ceil(x - gen.support_hi)));
    const int j1 = std::min(pl.size() - 1, static_cast<int>(std::floor(x - gen.support_lo)));
    for (int c = 0; c < p.dim(); ++c) out.points.at(s, c) = 0.0;
    for (int j = j0; j <= j1; ++j) {
      const double w = gen.phi(x - j);
      if (w == 0.0) continue;
      for (int c = 0; c < p.dim(); ++c) out.points.at(s, c) += w * pl.at(j, c);
    }
  }
  return out;
}

KappaDecay empirical_kappa_decay(const GlueScheme& g, const Chain& p, int lmax) {
  if (lmax < 2) throw DomainError("empirical_kappa_decay needs at least 2 levels");
  KappaDecay out;
  Chain cur = p;
  for (int l = 0; l <= lmax; ++l) {
    out.kappas.push_back(kappa_chain(cur, g.spread()).as_double());
    if (l < lmax) cur = subdivide_once(g, cur);
  }
  // regression over the tail of finite, nonzero values
  std::vector<std::pair<double, double>> pts;  // (level, log2 kappa)
  const int start = std::max(1, lmax / 2);
  for (int l = start; l <= lmax; ++l) {
    const double kap = out.kappas[l];
    if (std::isfinite(kap) && kap > 1e-300) pts.push_back({static_cast<double>(l), std::log2(kap)});
  }
  out.tail_start = start;
  if (pts.size() < 2) {
    bool all_tiny = true;
    for (int l = start; l <= lmax; ++l)
      if (!(out.kappas[l] <= 1e-300)) all_tiny = false;
    if (all_tiny) {
      out.exact = true;  // distortion identically zero: linear data
      return out;
    }
    throw DomainError("empirical_kappa_decay: distortion stayed infinite, no regression possible");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = pts.size();
  out.alpha_hat = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

double derivative_floor(const GlueScheme& g, const Chain& p, int level, double z) {
  const Chain pl = subdivide(g, p, level);
  const double scale = std::ldexp(1.0, level);
  const double hi = p.size() - g.spread() + 1 - z;
  double floor_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < pl.size(); ++i) {
    const double t0 = i / scale, t1 = (i + 1) / scale;
    if (t0 < z || t1 > hi) continue;
    double s = 0.0;
    for (int c = 0; c < pl.dim(); ++c) s += sqr(pl.at(i + 1, c) - pl.at(i, c));
    floor_val = std::min(floor_val, scale * std::sqrt(s));
  }
  if (!std::isfinite(floor_val)) throw DomainError("derivative_floor: no difference inside I_z");
  return floor_val;
}

HolderEstimate empirical_holder(const GlueScheme& g, const Chain& p, int k, double z,
                                const HolderOptions& opt) {
  if (k < 1 || k > 2) throw DomainError("empirical_holder supports k in {1, 2}");
  const int ell = opt.deep_level;
  if (ell < 6) throw DomainError("empirical_holder needs a deep level (>= 6)");
  const Generator gen = hat_generator();
  const double lo = z, hi = p.size() - g.spread() + 1 - z;
  if (hi - lo < 1.0) throw DomainError("empirical_holder: parameter interval too short");

  // dyadic samples of the curve at the deep level; with the hat generator
  // these are the control points themselves
  const Chain pl = subdivide(g, p, ell);
  const double h0 = std::ldexp(1.0, -ell);
  const int i_lo = static_cast<int>(std::ceil(lo / h0));
  const int i_hi = static_cast<int>(std::floor(hi / h0));

  // divided-difference proxy of the k-th derivative on the same grid
  const int d = p.dim();
  const int nder = i_hi - i_lo + 1 - k;
  if (nder < 16) throw DomainError("empirical_holder: not enough samples; lower z or raise level");
  Chain der(d, nder);
  const double invhk = std::pow(1.0 / h0, k);
  for (int i = 0; i < nder; ++i)
    for (int c = 0; c < d; ++c) {
      double v = 0.0;
      for (int r = 0; r <= k; ++r) {
        const double sign = ((k - r) % 2 == 0) ? 1.0 : -1.0;
        double binom = 1.0;
        for (int q = 0; q < r; ++q) binom = binom * (k - q) / (q + 1);
        v += sign * binom * pl.at(i_lo + i + r, c);
      }
      der.at(i, c) = v * invhk;
    }

  HolderEstimate out;
  double scale0 = 0.0;
  for (int i = 0; i < nder; ++i) scale0 = std::max(scale0, point_norm(der.point(i)));

  std::vector<std::pair<double, double>> pts;  // (log2 h, log2 omega)
  for (int j = 3; j <= ell - 2; ++j) {
    const int q = 1 << (ell - j);  // offset h = 2^-j in grid steps
    if (q >= nder) continue;
    double omega = 0.0;
    for (int i = 0; i + q < nder; ++i) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += sqr(der.at(i + q, c) - der.at(i, c));
      omega = std::max(omega, std::sqrt(s));
    }
    out.h_omega.push_back({std::ldexp(1.0, -j), omega});
    if (omega > 1e-12 * (1.0 + scale0)) pts.push_back({-static_cast<double>(j), std::log2(omega)});
  }
  if (pts.empty()) {
    out.exact = true;  // modulus identically ~0 (e.g. straight-line data)
    return out;
  }
  // middle third of the dyadic grid dodges both discretization noise and
  // global-scale effects
  const std::size_t third = pts.size() / 3;
  std::vector<std::pair<double, double>> mid(pts.begin() + third, pts.end() - third);
  if (mid.size() < 2) mid = pts;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : mid) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(mid.size());
  out.alpha_hat = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

std::string curve_to_csv(const SampledCurve& c) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  for (int k = 0; k < c.points.dim(); ++k) os << ",x" << k;
  os << "\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    os << c.t[i];
    for (int k = 0; k < c.points.dim(); ++k) os << "," << c.points.at(static_cast<int>(i), k);
    os << "\n";
  }
  return os.str();
}

std::string curve_to_svg(const SampledCurve& c, int width, int height) {
  if (c.points.dim() < 2) throw DomainError("svg export needs a planar curve");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int i = 0; i < c.points.size(); ++i) {
    xmin = std::min(xmin, c.points.at(i, 0));
    xmax = std::max(xmax, c.points.at(i, 0));
    ymin = std::min(ymin, c.points.at(i, 1));
    ymax = std::max(ymax, c.points.at(i, 1));
  }
  const double spanx = std::max(1e-12, xmax - xmin), spany = std::max(1e-12, ymax - ymin);
  const double s = 0.9 * std::min(width / spanx, height / spany);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
  for (int i = 0; i < c.points.size(); ++i) {
    const double x = 0.05 * width + s * (c.points.at(i, 0) - xmin);
    const double y = height - (0.05 * height + s * (c.points.at(i, 1) - ymin));
    os << x << "," << y << " ";
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace gluecert
