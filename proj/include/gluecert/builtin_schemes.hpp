#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "gluecert/scheme.hpp"

namespace gluecert {

// Scheme whose rules are weighted averages; weights(lambda, r) multiplies
// point i+r in rule lambda, each row summing to one.
class LinearGlueScheme final : public GlueScheme {
public:
  LinearGlueScheme(Info info, Eigen::MatrixXd weights);

  const Eigen::MatrixXd& weights() const { return w_; }

  // The pair of n x n window matrices A_0, A_1 realizing the self-maps.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> window_matrices() const;

  void eval_rule(int l, const ChainT<double>& c, int i0, std::span<double> o) const override;
  void eval_rule(int l, const ChainT<Interval>& c, int i0, std::span<Interval> o) const override;
  void eval_rule(int l, const ChainT<DDual>& c, int i0, std::span<DDual> o) const override;
  void eval_rule(int l, const ChainT<IDual>& c, int i0, std::span<IDual> o) const override;

private:
  Eigen::MatrixXd w_;  // 2 x (m+1)
};

// Registry.  Ids: "chaikin", "fps", "cps2d", "spoiler", "bspline_tau:<t>",
// or a path to a JSON mask file {"m":..,"tau":..,"a0":[..],"a1":[..]}.
// Every scheme is validated before being returned.
SchemePtr make_scheme(const std::string& id, int dim = 2);

std::vector<std::string> builtin_ids();

// Loads a custom linear scheme from a mask file.
SchemePtr load_mask_file(const std::string& path, int dim);

}  // namespace gluecert
