#include "adaloc/ensemble.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace adaloc {

Ensemble::Ensemble(Matrix members) : members_(std::move(members)) {
  if (members_.cols() < 2)
    throw std::invalid_argument("Ensemble: need at least 2 members, got " +
                                std::to_string(members_.cols()));
  if (members_.rows() < 1) throw std::invalid_argument("Ensemble: empty state dimension");
  if (!members_.allFinite()) throw std::invalid_argument("Ensemble: non-finite member entries");
}

void Ensemble::set_members(Matrix members) {
  if (members.rows() != members_.rows() || members.cols() < 2)
    throw std::invalid_argument("Ensemble::set_members: incompatible shape");
  members_ = std::move(members);
  mean_.reset();
  anomalies_.reset();
}

const Vector& Ensemble::mean() const {
  if (!mean_) mean_ = members_.rowwise().mean();
  return *mean_;
}

const Matrix& Ensemble::anomalies() const {
  if (!anomalies_) anomalies_ = members_.colwise() - mean();
  return *anomalies_;
}

Matrix Ensemble::covariance() const {
  const Matrix& X = anomalies();
  return (X * X.transpose()) / static_cast<double>(size() - 1);
}

Ensemble inflate(const Ensemble& ens, double alpha) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("inflate: alpha must be >= 1 (deflation unsupported)");
  if (alpha == 1.0) return ens;
  Matrix inflated = (alpha * ens.anomalies()).colwise() + ens.mean();
  return Ensemble(std::move(inflated));
}

ObservationOperator::ObservationOperator(std::vector<Index> indices, Index state_dim)
    : indices_(std::move(indices)), state_dim_(state_dim) {
  if (indices_.empty()) throw std::invalid_argument("ObservationOperator: no observed indices");
  std::unordered_set<Index> seen;
  for (Index i : indices_) {
    if (i < 0 || i >= state_dim_)
      throw std::invalid_argument("ObservationOperator: index " + std::to_string(i) +
                                  " out of range [0, " + std::to_string(state_dim_) + ")");
    if (!seen.insert(i).second)
      throw std::invalid_argument("ObservationOperator: duplicate index " + std::to_string(i));
  }
}

ObservationOperator ObservationOperator::from_one_based(const std::vector<Index>& indices,
                                                        Index state_dim) {
  std::vector<Index> shifted(indices.size());
  std::transform(indices.begin(), indices.end(), shifted.begin(),
                 [](Index i) { return i - 1; });
  return ObservationOperator(std::move(shifted), state_dim);
}

Observation::Observation(Vector values_, Vector error_variances_)
    : values(std::move(values_)), error_variances(std::move(error_variances_)) {
  if (values.size() != error_variances.size())
    throw std::invalid_argument("Observation: values/variances length mismatch");
  if ((error_variances.array() <= 0.0).any())
    throw std::invalid_argument("Observation: error variances must be strictly positive");
}

Vector project_to_obs(const Vector& x, const ObservationOperator& H) {
  if (x.size() != H.state_dim())
    throw std::invalid_argument("project_to_obs: state dimension mismatch");
  Vector out(H.obs_dim());
  for (Index k = 0; k < H.obs_dim(); ++k) out[k] = x[H.indices()[static_cast<size_t>(k)]];
  return out;
}

Matrix project_rows(const Matrix& m, const ObservationOperator& H) {
  if (m.rows() != H.state_dim())
    throw std::invalid_argument("project_rows: row dimension mismatch");
  Matrix out(H.obs_dim(), m.cols());
  for (Index k = 0; k < H.obs_dim(); ++k)
    out.row(k) = m.row(H.indices()[static_cast<size_t>(k)]);
  return out;
}

Matrix project_rows_cols(const Matrix& m, const ObservationOperator& H) {
  if (m.rows() != H.state_dim() || m.cols() != H.state_dim())
    throw std::invalid_argument("project_rows_cols: expected square n x n input");
  Matrix out(H.obs_dim(), H.obs_dim());
  for (Index r = 0; r < H.obs_dim(); ++r)
    for (Index c = 0; c < H.obs_dim(); ++c)
      out(r, c) = m(H.indices()[static_cast<size_t>(r)], H.indices()[static_cast<size_t>(c)]);
  return out;
}

Matrix project_to_obs(const Ensemble& ens, const ObservationOperator& H) {
  return project_rows(ens.members(), H);
}

}  // namespace adaloc
