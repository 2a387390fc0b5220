#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adaloc/model.hpp"
#include "adaloc/types.hpp"

namespace adaloc {

/// Gaussian taper value exp(-u^2/2) for scaled distance u >= 0.
double gauss_loc(double u);

/// d/dr of the Gaussian taper evaluated at scaled distance d/r.
/// Equals exp(-d^2/(2 r^2)) * d^2 / r^3; safe against taper underflow.
double gauss_loc_dradius(double dist, double radius);

enum class MeanKind { Min, Max, Mean, Sqrt, Rms, Harm };

MeanKind mean_kind_from_string(std::string_view name);
std::string to_string(MeanKind kind);

/// True for the kinds with well-defined partial derivatives everywhere
/// (all but min and max, which are non-differentiable at ties).
bool mean_kind_differentiable(MeanKind kind);

/// Commutative idempotent combination of two taper values a, b >= 0.
/// The harmonic mean is extended continuously with harm(0, 0) = 0.
double combine(MeanKind kind, double a, double b);

/// Assignment of each state component to a radius group.
class GroupMapping {
 public:
  /// assignment: 0-based group id per state component; every group in
  /// [0, group_count) must be nonempty.
  GroupMapping(std::vector<int> assignment, int group_count);

  static GroupMapping single(Index n);
  static GroupMapping modulo(Index n, Index q);
  static GroupMapping blocks(Index n, Index count);
  static GroupMapping per_variable(Index n);

  Index state_dim() const { return static_cast<Index>(assignment_.size()); }
  int group_count() const { return group_count_; }
  int group_of(Index i) const { return assignment_[static_cast<size_t>(i)]; }
  const std::vector<int>& assignment() const { return assignment_; }

 private:
  std::vector<int> assignment_;
  int group_count_;
};

/// Prolongation: per-component radii r_i = upsilon[group(i)].
Vector prolong(const GroupMapping& mapping, const Vector& upsilon);

/// Pairwise model distances for the given row/column component index sets.
Matrix pairwise_distances(const ModelSystem& model, const std::vector<Index>& rows,
                          const std::vector<Index>& cols);

/// Taper block rho[rows, cols] from per-entry radii:
/// rho_ij = m( l(d_ij / r_row_i), l(d_ij / r_col_j) ), Gaussian l.
/// All radii must be positive; entries lie in [0, 1] with l(0) = 1.
Matrix build_rho_block(const Matrix& dist, const Vector& radii_rows, const Vector& radii_cols,
                       MeanKind kind);

/// Full n x n taper matrix; upper triangle built, then mirrored, so the
/// result is exactly symmetric with unit diagonal.
Matrix build_rho(const ModelSystem& model, const Vector& radii, MeanKind kind);

/// Element-wise partial derivative of build_rho_block with respect to the
/// group-j radius. Entries where neither endpoint belongs to group j are
/// exactly zero. Requires a differentiable mean kind.
Matrix drho_dupsilon_block(const Matrix& dist, const std::vector<int>& row_groups,
                           const std::vector<int>& col_groups, const Vector& upsilon, int group_j,
                           MeanKind kind);

/// Full n x n derivative of build_rho with radii = prolong(mapping, upsilon).
Matrix drho_dupsilon(const ModelSystem& model, const GroupMapping& mapping, const Vector& upsilon,
                     int group_j, MeanKind kind);

/// Schur (element-wise) product of a taper block and a covariance block.
Matrix localize_cov(const Matrix& rho_block, const Matrix& cov_block);

}  // namespace adaloc
