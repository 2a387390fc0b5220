#pragma once

// Test-only reference implementations, kept deliberately independent of the
// library's computational paths: full matrices, explicit inverses, plain
// loops. They exist to cross-check the observation-space production code.

#include <cmath>
#include <optional>
#include <vector>

#include "adaloc/adaptive.hpp"
#include "adaloc/denkf.hpp"
#include "adaloc/ensemble.hpp"
#include "adaloc/lorenz96.hpp"
#include "adaloc/rng.hpp"

namespace testref {

using adaloc::Index;
using adaloc::Matrix;
using adaloc::Vector;

inline Matrix selection_matrix(const adaloc::ObservationOperator& H) {
  Matrix out = Matrix::Zero(H.obs_dim(), H.state_dim());
  for (Index k = 0; k < H.obs_dim(); ++k) out(k, H.indices()[static_cast<size_t>(k)]) = 1.0;
  return out;
}

// Sample covariance by explicit loops.
inline Matrix loop_covariance(const Matrix& members) {
  const Index n = members.rows(), N = members.cols();
  Vector mean = Vector::Zero(n);
  for (Index e = 0; e < N; ++e) mean += members.col(e);
  mean /= static_cast<double>(N);
  Matrix P = Matrix::Zero(n, n);
  for (Index e = 0; e < N; ++e) {
    const Vector dev = members.col(e) - mean;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) P(i, j) += dev[i] * dev[j];
  }
  return P / static_cast<double>(N - 1);
}

// DEnKF analysis per the textbook equations: full P, explicit inverse.
inline Matrix dense_denkf(const Matrix& members, const Vector& y, const Vector& rvar,
                          const adaloc::ObservationOperator& Hop, const Matrix& rho_full) {
  const Index N = members.cols();
  const Matrix H = selection_matrix(Hop);
  const Vector xbar = members.rowwise().mean();
  const Matrix X = members.colwise() - xbar;
  const Matrix P = rho_full.cwiseProduct(loop_covariance(members));
  const Matrix S = H * P * H.transpose() + Matrix(rvar.asDiagonal());
  const Matrix K = P * H.transpose() * S.inverse();
  const Vector d = y - H * xbar;
  const Vector xbar_a = xbar + K * d;
  const Matrix X_a = X - 0.5 * K * (H * X);
  return X_a.colwise() + xbar_a;
}

// MAP cost evaluated with explicit matrices: the fit norms with dense
// S^{-1}, member loops, plus the gamma prior term.
inline double dense_cost(const Matrix& members, const Vector& y, const Vector& rvar,
                         const adaloc::ObservationOperator& Hop, const Matrix& rho_full,
                         const Vector& alpha, const Vector& beta, const Vector& upsilon) {
  const Index N = members.cols();
  const Matrix H = selection_matrix(Hop);
  const Vector xbar = members.rowwise().mean();
  const Matrix X = members.colwise() - xbar;
  const Matrix P = rho_full.cwiseProduct(loop_covariance(members));
  const Matrix HPHt = H * P * H.transpose();
  const Matrix R = Matrix(rvar.asDiagonal());
  const Matrix S = HPHt + R;
  const Matrix Sinv = S.inverse();
  const Matrix Rinv = R.inverse();
  const Matrix HX = H * X;
  const Vector d = y - H * xbar;
  const Matrix K = P * H.transpose() * Sinv;
  const Matrix HK = H * K;

  double value = 0.0;
  for (Index e = 0; e < N; ++e) {
    const Vector z = d - 0.5 * HX.col(e);
    const Vector w = Sinv * z;
    value += 0.5 * w.dot(HPHt * w);
    const Vector g = (Matrix::Identity(HX.rows(), HX.rows()) - HK) * d - HX.col(e) +
                     0.5 * HK * HX.col(e);
    value += 0.5 * g.dot(Rinv * g);
  }
  for (Index j = 0; j < upsilon.size(); ++j)
    value += beta[j] * upsilon[j] - (alpha[j] - 1.0) * std::log(upsilon[j]);
  return value;
}

// Central finite-difference gradient of a value-only objective.
template <typename F>
Vector fd_gradient(const F& value_at, const Vector& upsilon, double step_scale = 1e-6) {
  Vector grad(upsilon.size());
  for (Index j = 0; j < upsilon.size(); ++j) {
    const double h = step_scale * std::max(1.0, std::abs(upsilon[j]));
    Vector up = upsilon, dn = upsilon;
    up[j] += h;
    dn[j] -= h;
    grad[j] = (value_at(up) - value_at(dn)) / (2.0 * h);
  }
  return grad;
}

// Randomized observation-space instance on a ring-distance model.
struct Instance {
  std::unique_ptr<adaloc::Lorenz96> model;
  std::optional<adaloc::Ensemble> forecast;
  std::optional<adaloc::Observation> obs;
  std::optional<adaloc::ObservationOperator> H;
  std::optional<adaloc::LocalizationSpec> spec;
  std::optional<adaloc::GammaPrior> prior;
  Vector upsilon;

  Matrix rho_full() const {
    return adaloc::build_rho(*model, adaloc::prolong(spec->mapping, upsilon), spec->mean_kind);
  }
};

inline Instance random_instance(adaloc::Rng& rng, adaloc::MeanKind kind, Index n, Index m,
                                Index N, Index g) {
  Instance inst;
  inst.model = std::make_unique<adaloc::Lorenz96>(adaloc::Lorenz96Config{n, 8.0, 0.01});

  Matrix members(n, N);
  for (Index e = 0; e < N; ++e) members.col(e) = 2.0 * rng.normal_vector(n);
  inst.forecast.emplace(std::move(members));

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    const auto pick = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(pick)]);
  }
  std::vector<Index> observed(order.begin(), order.begin() + m);
  std::sort(observed.begin(), observed.end());
  inst.H.emplace(observed, n);

  Vector rvar(m);
  for (Index i = 0; i < m; ++i) rvar[i] = 0.3 + rng.uniform();
  inst.obs.emplace(adaloc::project_to_obs(inst.forecast->mean(), *inst.H) + rng.normal_vector(m),
                   rvar);

  std::vector<int> assignment(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    assignment[static_cast<size_t>(i)] =
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(g)));
  for (Index j = 0; j < g; ++j) assignment[static_cast<size_t>(j)] = static_cast<int>(j);
  inst.spec.emplace(adaloc::LocalizationSpec{kind, adaloc::GroupMapping(assignment, static_cast<int>(g))});

  Vector mean(g), var(g);
  for (Index j = 0; j < g; ++j) {
    mean[j] = 1.0 + 4.0 * rng.uniform();
    var[j] = (0.25 + 0.5 * rng.uniform()) * mean[j] * mean[j];
  }
  inst.prior.emplace(mean, var);

  inst.upsilon.resize(g);
  for (Index j = 0; j < g; ++j) inst.upsilon[j] = 0.5 + 4.0 * rng.uniform();
  return inst;
}

}  // namespace testref
