#pragma once

#include <utility>

#include "adaloc/types.hpp"

namespace adaloc {

/// (alpha, beta) of a gamma distribution with the given mean and variance:
/// alpha = mean^2/var, beta = mean/var. Requires mean > 0 and
/// 0 < var <= mean^2 so that alpha >= 1 and the negative-log prior
/// beta*u - (alpha-1)*log(u) stays bounded below as u -> 0+.
std::pair<double, double> prior_to_alpha_beta(double mean, double variance);

/// Independent gamma priors, one per radius group.
class GammaPrior {
 public:
  GammaPrior(Vector mean, Vector variance);

  /// Scalar prior broadcast over g groups.
  static GammaPrior uniform(double mean, double variance, Index groups);

  Index groups() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Vector& variance() const { return variance_; }
  const Vector& alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }

  /// sum_j beta_j u_j - (alpha_j - 1) log(u_j).
  double neg_log_term(const Vector& upsilon) const;

  /// Per-group derivative beta_j - (alpha_j - 1)/u_j.
  Vector neg_log_gradient(const Vector& upsilon) const;

 private:
  Vector mean_, variance_, alpha_, beta_;
};

}  // namespace adaloc
