#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gluecert/builtin_schemes.hpp"
#include "gluecert/scheme.hpp"

namespace gluecert {

// Continuous, compactly supported partition of unity used to turn chains
// into parametric curves.
struct Generator {
  std::string name;
  double support_lo = -1.0, support_hi = 1.0;
  double lebesgue = 1.0;  // max_t sum_j |phi(t - j)|
  std::function<double(double)> phi;

  double support_radius() const { return std::max(-support_lo, support_hi); }
};

// Hat function, support [-1,1], Lebesgue constant 1.
Generator hat_generator();

// Cardinal B-spline of degree p on integer knots, shifted so it solves this
// project's refinement alignment for a B-spline scheme with mask exponents
// starting at t_min (phi = B_p(. - t_min/2 ... )); see basic_generator.
Generator bspline_generator(int degree, double shift);

// Basic limit function of a linear scheme when it is a B-spline scheme
// (mask proportional to binomials); empty otherwise.
std::optional<Generator> basic_generator(const LinearGlueScheme& s);

struct SampledCurve {
  int level = 0;
  std::vector<double> t;
  Chain points;  // one row per parameter
};

// Evaluates sum_j p^level_j phi(2^level t - j) on a uniform grid of I_z.
// Requires 2^-level * support_radius <= z.
SampledCurve limit_samples(const GlueScheme& g, const Chain& p, int level, const Generator& gen,
                           double z, int samples);

// Minimal level at which the generator's support fits inside the margin.
int min_level_for(const Generator& gen, double z);

struct KappaDecay {
  std::vector<double> kappas;  // per level 0..lmax (inf possible)
  double alpha_hat = 0.0;
  bool exact = false;  // distortion identically ~0, no regression possible
  int tail_start = 0;
};

// Least-squares slope of log2 kappa_l over the tail; alpha_hat = -slope.
KappaDecay empirical_kappa_decay(const GlueScheme& g, const Chain& p, int lmax);

// min_i ||2^level Delta p^level_i|| over indices inside I_z; an empirical
// lower-bound proxy for the derivative magnitude of the limit.
double derivative_floor(const GlueScheme& g, const Chain& p, int level, double z);

struct HolderEstimate {
  double alpha_hat = 0.0;
  bool exact = false;
  std::vector<std::pair<double, double>> h_omega;  // (h, omega(h)) pairs
};

struct HolderOptions {
  int deep_level = 10;
  int samples_per_unit = 0;  // 0: use the dyadic grid of the deep level
};

// Estimates the order-k Hoelder exponent of the limit from the modulus of
// continuity of a divided-difference proxy of the k-th derivative, by
// log-log regression over the middle third of a dyadic h-grid.
HolderEstimate empirical_holder(const GlueScheme& g, const Chain& p, int k, double z,
                                const HolderOptions& opt = {});

// CSV: t, x0..x_{d-1} per row.  SVG: polyline of a planar curve.
std::string curve_to_csv(const SampledCurve& c);
std::string curve_to_svg(const SampledCurve& c, int width = 640, int height = 480);

}  // namespace gluecert
