#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gluecert/boxes.hpp"
#include "gluecert/builtin_schemes.hpp"
#include "gluecert/chain_ops.hpp"
#include "gluecert/difference.hpp"
#include "gluecert/scheme.hpp"

namespace gluecert {

// ---------------------------------------------------------------------------
// derivative structure at the standard chain

// Full Jacobians of the two window self-maps at a concrete chain, in flat
// coordinates: entry (i*d+c, j*d+c') is the partial of output coordinate
// (i,c) with respect to input coordinate (j,c').
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> window_jacobians(const GlueScheme& g, const Chain& at);

// Identity-seeded dual chains for explicit Jacobian evaluations.
ChainT<DDual> seed_identity(const Chain& p);
ChainT<IDual> seed_identity_interval(const ChainT<Interval>& p);

// Interval enclosure of a window composition and of its Jacobian on a box.
struct IntervalJacobian {
  ChainT<Interval> value;
  IMat jac;  // (n*d) x ndirs
};
IntervalJacobian eval_with_jacobian(const GlueScheme& g, const IndexVector& iv,
                                    const ChainT<IDual>& seeded);

// Tangential and normal derivative schemes extracted from the window-map
// Jacobians at e.  For d = 1 the normal pair duplicates the tangential one.
struct DerivativePair {
  Eigen::MatrixXd a0, a1;  // tangential window matrices (n x n)
  Eigen::MatrixXd b0, b1;  // normal window matrices
  bool locally_linear = false;
  double deviation = 0.0;  // max |A - B|
};
DerivativePair tangent_normal(const GlueScheme& g);

// ---------------------------------------------------------------------------
// contraction bounds

// max over the 2^ell index vectors of 2^ell * bound(|M_Lambda|_2), the
// zero-radius limit of the computable contraction bound.  Plain doubles.
double gamma_star_zero(const GlueScheme& g, int ell);
double gamma_star_zero_from_jacobians(const Eigen::MatrixXd& m0, const Eigen::MatrixXd& m1, int n,
                                      int d, int ell);

struct BnbOptions {
  long max_boxes = 40000;
  double target = 0.995;
  int polish_rounds = 12;
  int threads = 1;
  double min_width = 1e-13;
};

struct BoundResult {
  bool ok = false;        // bound <= target
  double bound = std::numeric_limits<double>::infinity();
  long boxes = 0;
  double unresolved = 0.0;  // volume fraction still above target / undecidable
};

// Certified upper bound on the depth-ell contraction factor over the
// normalized delta-neighborhood, by branch and bound over u-boxes.
BoundResult gamma_star_delta(const GlueScheme& g, int ell, double delta, const BnbOptions& opt);

// Certified upper bound on max over the annulus delta <= |d|_2 <= gamma of
// kappa_k(e + d) / |d|_2.
BoundResult gamma_annulus(const GlueScheme& g, int k, double delta, double gamma,
                          const BnbOptions& opt);

// ---------------------------------------------------------------------------
// certificates and verdicts

struct Certificate {
  std::string scheme_id;
  int dim = 2;
  double delta = 0.0;
  double gamma = 0.0;  // == delta when only the inner bound is certified
  int ell = 0;
  int k = 0;           // 0 when no annulus bound is part of the certificate
  double bound = 1.0;  // certified inner contraction bound, < 1
  double annulus_bound = std::numeric_limits<double>::quiet_NaN();
  double alpha = 0.0;  // -log2(bound)/ell, clamped to (0, 1]
  long boxes_used = 0;
  double unresolved = 0.0;
};

struct CertifySearch {
  std::vector<int> ells = {1, 2, 3};
  std::vector<double> delta_grid = {1e-1, 1e-2, 1e-3};
  int k_max = 2;
  double gamma_max = 0.25;
  int gamma_steps = 4;
  long box_budget = 40000;
  long total_budget = 1000000;
  double target = 0.995;
  double annulus_target = 0.995;
  int polish_rounds = 12;
  int threads = 1;
};

struct CertifyOutcome {
  std::optional<Certificate> cert;
  double best_inner_bound = std::numeric_limits<double>::infinity();
  int best_ell = 0;
  double best_delta = 0.0;
  long boxes_used = 0;
  std::string note;
};

// Two-phase search: find (delta, ell) with a certified inner bound < 1
// maximizing the rate, then grow gamma while the annulus bound stays < 1.
CertifyOutcome certify_rate(const GlueScheme& g, const CertifySearch& cfg);

struct Justification {
  std::string name;
  double value = 0.0;
  std::string rule;
};

struct Verdict {
  enum class Level { unknown, convergent, c1, c1_alpha, almost_c2 };
  Level level = Level::unknown;
  double alpha = 0.0;  // exponent attached to the level, when any
  int certified_round = -1;
  double kappa_at_round = std::numeric_limits<double>::quiet_NaN();
  std::vector<Justification> reasons;
  std::string note;
};

const char* level_name(Verdict::Level level);

// Iterates the chain up to max_rounds; once the distortion falls inside the
// certificate's reach the limit is first-order Hoelder regular at the
// certified rate.  Never claims a negative: failure yields "unknown".
Verdict check_chain(const GlueScheme& g, const Certificate& cert, const Chain& p, int max_rounds);

// Joint-spectral-radius analysis of the derivative schemes.
struct CompanionAnalysis {
  DerivativePair pair;
  Eigen::MatrixXd a_rules, b_rules;  // 2 x (m+1) mask tables
  // rho upper bounds per difference order (index 0 <-> order 2)
  struct OrderInfo {
    int order = 0;
    bool exists = false;
    std::vector<double> rho_by_ell;  // rho_1 .. rho_ellmax
    double rho_best = std::numeric_limits<double>::infinity();
  };
  std::vector<OrderInfo> a_orders, b_orders;
  double c1_alpha = 0.0;  // from order-2 bounds of the worse of A, B; 0 = none
  double c2_alpha = 0.0;  // from order-3/order-4 bounds of A; 0 = none
};
CompanionAnalysis analyze_companion(const GlueScheme& g, int ell_max = 8);

// Composes certificate, companion analysis and a chain-level result into the
// strongest defensible verdict.  With premise_straightened the straightening
// hypothesis is assumed (scheme-level reporting).
Verdict regularity_verdict(const GlueScheme& g, const Certificate* cert,
                           const CompanionAnalysis* companion, const Verdict* chain_result,
                           bool premise_straightened = false);

// JSON round trips (certificates embed config/version/timing at the CLI level)
std::string certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const std::string& text);
std::string verdict_to_json(const Verdict& v, const std::string& scheme_id);

}  // namespace gluecert
