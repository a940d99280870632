#include "gluecert/builtin_schemes.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "gluecert/geometry.hpp"
#include "json.hpp"

namespace gluecert {

LinearGlueScheme::LinearGlueScheme(Info info, Eigen::MatrixXd weights)
    : GlueScheme([&] {
        info.linear = true;
        return info;
      }()),
      w_(std::move(weights)) {
  if (w_.rows() != 2 || w_.cols() != this->info().m + 1)
    throw DomainError("linear scheme: weights must be 2 x (m+1)");
  for (int l = 0; l < 2; ++l) {
    double s = 0.0;
    for (int r = 0; r < w_.cols(); ++r) s += w_(l, r);
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("linear scheme: rule weights must sum to 1");
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> LinearGlueScheme::window_matrices() const {
  const int n = spread();
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, n), a1 = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= info().m; ++c) {
      a0(r, r / 2 + c) = w_(r % 2, c);
      a1(r, (r + 1) / 2 + c) = w_((r + 1) % 2, c);
    }
  }
  return {a0, a1};
}

namespace {

template <class S>
void linear_eval(const Eigen::MatrixXd& w, int l, const ChainT<S>& c, int i0, std::span<S> out) {
  const int d = c.dim();
  for (int k = 0; k < d; ++k) out[k] = S{};
  for (int r = 0; r < w.cols(); ++r) {
    const double wr = w(l, r);
    if (wr == 0.0) continue;
    auto p = c.point(i0 + r);
    for (int k = 0; k < d; ++k) out[k] = out[k] + p[k] * wr;
  }
}

}  // namespace

void LinearGlueScheme::eval_rule(int l, const ChainT<double>& c, int i0, std::span<double> o) const {
  linear_eval(w_, l, c, i0, o);
}
void LinearGlueScheme::eval_rule(int l, const ChainT<Interval>& c, int i0, std::span<Interval> o) const {
  linear_eval(w_, l, c, i0, o);
}
void LinearGlueScheme::eval_rule(int l, const ChainT<DDual>& c, int i0, std::span<DDual> o) const {
  linear_eval(w_, l, c, i0, o);
}
void LinearGlueScheme::eval_rule(int l, const ChainT<IDual>& c, int i0, std::span<IDual> o) const {
  linear_eval(w_, l, c, i0, o);
}

namespace {

// Circle-preserving four-point rule (planar).  The inserted point between
// B = p_{i+1} and C = p_{i+2} lies on the circle through B and C whose signed
// curvature is the mean of the circles ABC and BCD, at the locus
// |BX|/|CX| = sqrt(|AC|/|BD|).  Writing s = h*kbar (half chord times
// curvature), cw = sqrt(1-s^2) and rho^2 = 1 + 2c*cw + c^2, the point is
//   X = B + (2ch/rho^2) * ((c + cw) u - s v),
// with u the unit chord direction and v = rot90(u).  This form is smooth
// through collinear data (s = 0 gives the affine |BX|/|CX| = c locus) and
// uses only +,-,*,/ and sqrt, so it evaluates over every scalar kind.
struct CpsRule {
  template <class S>
  void eval(int lambda, const ChainT<S>& c, int i0, std::span<S> out) const {
    using std::sqrt;
    if (lambda == 0) {  // interpolatory: keep the second point of the window
      auto p = c.point(i0 + 1);
      out[0] = p[0];
      out[1] = p[1];
      return;
    }
    auto A = c.point(i0), B = c.point(i0 + 1), C = c.point(i0 + 2), D = c.point(i0 + 3);

    auto norm_of = [](const S& x, const S& y) { return sqrt(sqr(x) + sqr(y)); };
    // signed curvature of the circle through three points
    auto curv = [&](std::span<const S> p, std::span<const S> q, std::span<const S> r) {
      S qx = q[0] - p[0], qy = q[1] - p[1];
      S rx = r[0] - p[0], ry = r[1] - p[1];
      S cr = cross2(qx, qy, rx, ry);
      S den = norm_of(qx, qy) * norm_of(r[0] - q[0], r[1] - q[1]) * norm_of(rx, ry);
      return (2.0 * cr) / den;
    };

    S kbar = (curv(A, B, C) + curv(B, C, D)) * 0.5;
    S ratio = sqrt(norm_of(C[0] - A[0], C[1] - A[1]) / norm_of(D[0] - B[0], D[1] - B[1]));

    S wx = C[0] - B[0], wy = C[1] - B[1];
    S nw = norm_of(wx, wy);
    S ux = wx / nw, uy = wy / nw;
    S h = nw * 0.5;
    S s = h * kbar;
    S cw = sqrt(1.0 - sqr(s));
    S rho2 = 1.0 + 2.0 * (ratio * cw) + sqr(ratio);
    S t = (2.0 * (ratio * h)) / rho2;
    S along = ratio + cw;
    // v = (-uy, ux)
    out[0] = B[0] + t * (along * ux + s * uy);
    out[1] = B[1] + t * (along * uy - s * ux);
  }
};

// The closing example: quartic-B-spline linear part plus a curvature-like
// bump (||D2 p|| / ||p2 - p0||) D2 p on the even rule.  Its linear part at e
// is exactly the quartic B-spline pair.
struct SpoilerRule {
  template <class S>
  void eval(int lambda, const ChainT<S>& c, int i0, std::span<S> out) const {
    const int d = c.dim();
    auto q0 = c.point(i0), q1 = c.point(i0 + 1), q2 = c.point(i0 + 2);
    if (lambda == 1) {
      for (int k = 0; k < d; ++k) out[k] = (q0[k] + 10.0 * q1[k] + 5.0 * q2[k]) / 16.0;
      return;
    }
    std::vector<S> d2(d), span(d), bump(d);
    for (int k = 0; k < d; ++k) {
      d2[k] = q0[k] - 2.0 * q1[k] + q2[k];
      span[k] = q2[k] - q0[k];
    }
    norm_scaled(std::span<const S>(d2.data(), d2.size()), std::span<S>(bump.data(), bump.size()));
    S gap = pnorm(std::span<const S>(span.data(), span.size()));
    for (int k = 0; k < d; ++k)
      out[k] = (5.0 * q0[k] + 10.0 * q1[k] + q2[k]) / 16.0 + bump[k] / gap;
  }
};

SchemePtr make_linear(GlueScheme::Info info, std::vector<std::vector<double>> rows) {
  Eigen::MatrixXd w(2, static_cast<int>(rows[0].size()));
  for (int l = 0; l < 2; ++l)
    for (int r = 0; r < w.cols(); ++r) w(l, r) = rows[l][r];
  auto s = std::make_shared<LinearGlueScheme>(std::move(info), std::move(w));
  validate_scheme(*s);
  return s;
}

SchemePtr make_chaikin(int dim) {
  GlueScheme::Info in;
  in.id = "chaikin";
  in.dim = dim;
  in.m = 1;
  in.n = 3;
  in.tau = 0.5;
  in.nu = 1.0;
  return make_linear(in, {{0.75, 0.25}, {0.25, 0.75}});
}

SchemePtr make_fps(int dim) {
  GlueScheme::Info in;
  in.id = "fps";
  in.dim = dim;
  in.m = 3;
  in.n = 7;
  in.tau = 0.0;
  in.nu = 1.0;
  return make_linear(in, {{0.0, 1.0, 0.0, 0.0},
                          {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16}});
}

SchemePtr make_bspline_tau(double tau, int dim) {
  if (tau < 0.0 || tau >= 1.0) throw DomainError("bspline_tau: shift must lie in [0,1)");
  GlueScheme::Info in;
  in.id = "bspline_tau:" + std::to_string(tau);
  in.dim = dim;
  in.m = 2;
  in.n = 5;
  in.tau = tau;
  in.nu = 1.0;
  return make_linear(in, {{(4 - 3 * tau) / 8, (4 + 2 * tau) / 8, tau / 8},
                          {(1 - tau) / 8, (6 - 2 * tau) / 8, (1 + 3 * tau) / 8}});
}

SchemePtr make_cps(int dim) {
  if (dim != 2) throw DomainError("cps2d is planar; use dim = 2");
  GlueScheme::Info in;
  in.id = "cps2d";
  in.dim = 2;
  in.m = 3;
  in.n = 7;
  in.tau = 0.0;
  in.nu = 1.0;
  auto s = std::make_shared<SchemeWith<CpsRule>>(in, CpsRule{});
  validate_scheme(*s);
  return s;
}

SchemePtr make_spoiler(int dim) {
  GlueScheme::Info in;
  in.id = "spoiler";
  in.dim = dim;
  in.m = 2;
  in.n = 5;
  in.tau = 0.5;
  in.nu = 1.0;
  auto s = std::make_shared<SchemeWith<SpoilerRule>>(in, SpoilerRule{});
  validate_scheme(*s);
  return s;
}

}  // namespace

std::vector<std::string> builtin_ids() {
  return {"chaikin", "fps", "cps2d", "bspline_tau:<tau>", "spoiler"};
}

SchemePtr load_mask_file(const std::string& path, int dim) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open mask file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw DomainError("mask file " + path + ": " + e.what());
  }
  for (const char* key : {"m", "tau", "a0", "a1"})
    if (!j.contains(key)) throw DomainError("mask file " + path + ": missing field '" + key + "'");
  const int m = j["m"].get<int>();
  GlueScheme::Info in;
  in.id = j.value("name", std::string("mask:") + path);
  in.dim = dim;
  in.m = m;
  in.n = 2 * m + 1;
  in.tau = j["tau"].get<double>();
  in.nu = 1.0;
  auto a0 = j["a0"].get<std::vector<double>>();
  auto a1 = j["a1"].get<std::vector<double>>();
  if (static_cast<int>(a0.size()) != m + 1 || static_cast<int>(a1.size()) != m + 1)
    throw DomainError("mask file " + path + ": rules must have m+1 weights");
  return make_linear(in, {a0, a1});
}

SchemePtr make_scheme(const std::string& id, int dim) {
  if (dim < 1) throw DomainError("scheme dimension must be >= 1");
  if (id.size() > 5 && id.substr(id.size() - 5) == ".json") return load_mask_file(id, dim);

  std::string name = id;
  std::string param;
  if (auto pos = id.find(':'); pos != std::string::npos) {
    name = id.substr(0, pos);
    param = id.substr(pos + 1);
  }
  if (name == "chaikin") return make_chaikin(dim);
  if (name == "fps") return make_fps(dim);
  if (name == "cps2d") return make_cps(dim);
  if (name == "spoiler") return make_spoiler(dim);
  if (name == "bspline_tau") {
    if (param.empty()) throw DomainError("bspline_tau needs a parameter, e.g. bspline_tau:0.25");
    return make_bspline_tau(std::stod(param), dim);
  }
  throw DomainError("unknown scheme id: " + id);
}

}  // namespace gluecert
