#include "adaloc/gamma_prior.hpp"

#include <cmath>
#include <stdexcept>

namespace adaloc {

std::pair<double, double> prior_to_alpha_beta(double mean, double variance) {
  if (!(mean > 0)) throw std::invalid_argument("gamma prior: mean must be positive");
  if (!(variance > 0)) throw std::invalid_argument("gamma prior: variance must be positive");
  if (variance > mean * mean)
    throw std::invalid_argument("gamma prior: variance > mean^2 gives shape alpha < 1, unsupported");
  return {mean * mean / variance, mean / variance};
}

GammaPrior::GammaPrior(Vector mean, Vector variance)
    : mean_(std::move(mean)), variance_(std::move(variance)) {
  if (mean_.size() != variance_.size() || mean_.size() < 1)
    throw std::invalid_argument("GammaPrior: mean/variance length mismatch");
  alpha_.resize(mean_.size());
  beta_.resize(mean_.size());
  for (Index j = 0; j < mean_.size(); ++j) {
    auto [a, b] = prior_to_alpha_beta(mean_[j], variance_[j]);
    alpha_[j] = a;
    beta_[j] = b;
  }
}

GammaPrior GammaPrior::uniform(double mean, double variance, Index groups) {
  return GammaPrior(Vector::Constant(groups, mean), Vector::Constant(groups, variance));
}

double GammaPrior::neg_log_term(const Vector& upsilon) const {
  if (upsilon.size() != groups())
    throw std::invalid_argument("GammaPrior: radii length != group count");
  double value = 0.0;
  for (Index j = 0; j < groups(); ++j)
    value += beta_[j] * upsilon[j] - (alpha_[j] - 1.0) * std::log(upsilon[j]);
  return value;
}

Vector GammaPrior::neg_log_gradient(const Vector& upsilon) const {
  if (upsilon.size() != groups())
    throw std::invalid_argument("GammaPrior: radii length != group count");
  Vector g(groups());
  for (Index j = 0; j < groups(); ++j) g[j] = beta_[j] - (alpha_[j] - 1.0) / upsilon[j];
  return g;
}

}  // namespace adaloc
