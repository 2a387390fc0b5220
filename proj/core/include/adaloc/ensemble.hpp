#pragma once

#include <optional>
#include <vector>

#include "adaloc/types.hpp"

namespace adaloc {

/// Ensemble of model states. Columns of the member matrix are members.
///
/// Mean and anomalies are cached lazily; the caches are dropped whenever the
/// member matrix is replaced. Once inside an assimilation cycle an ensemble
/// is treated as immutable, so all statistics below are pure reads.
class Ensemble {
 public:
  /// members: n x N, N >= 2.
  explicit Ensemble(Matrix members);

  Index dim() const { return members_.rows(); }
  Index size() const { return members_.cols(); }

  const Matrix& members() const { return members_; }
  void set_members(Matrix members);

  /// Column average, (1/N) sum of members.
  const Vector& mean() const;

  /// X = members - mean * 1^T. Row sums are zero up to round-off.
  const Matrix& anomalies() const;

  /// P = X X^T / (N-1). Materializes n x n; intended for small-n use only.
  Matrix covariance() const;

 private:
  Matrix members_;
  mutable std::optional<Vector> mean_;
  mutable std::optional<Matrix> anomalies_;
};

/// Multiplicative covariance inflation: anomalies scaled by alpha >= 1,
/// mean kept exactly. Covariance scales by alpha^2.
Ensemble inflate(const Ensemble& ens, double alpha);

/// Row-selection observation operator (the 0/1 matrix H applied as indexing).
class ObservationOperator {
 public:
  /// indices: 0-based state indices, unique, each in [0, state_dim).
  ObservationOperator(std::vector<Index> indices, Index state_dim);

  /// Convenience for configs and literature-style 1-based index lists.
  static ObservationOperator from_one_based(const std::vector<Index>& indices, Index state_dim);

  Index obs_dim() const { return static_cast<Index>(indices_.size()); }
  Index state_dim() const { return state_dim_; }
  const std::vector<Index>& indices() const { return indices_; }

 private:
  std::vector<Index> indices_;
  Index state_dim_;
};

/// Observation vector with diagonal error covariance R.
struct Observation {
  Vector values;
  Vector error_variances;  // all > 0

  Observation(Vector values_, Vector error_variances_);
};

/// H x: selected entries of a state vector, in index order.
Vector project_to_obs(const Vector& x, const ObservationOperator& H);

/// H X: selected rows of an n x k matrix (e.g. anomalies).
Matrix project_rows(const Matrix& m, const ObservationOperator& H);

/// H M H^T: selected rows and columns of an n x n matrix.
Matrix project_rows_cols(const Matrix& m, const ObservationOperator& H);

/// H applied to every member; returns the m x N matrix of projected members.
Matrix project_to_obs(const Ensemble& ens, const ObservationOperator& H);

}  // namespace adaloc
