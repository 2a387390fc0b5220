#include "adaloc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adaloc {

double gauss_loc(double u) {
  if (u < 0) throw std::invalid_argument("gauss_loc: negative scaled distance");
  return std::exp(-0.5 * u * u);
}

double gauss_loc_dradius(double dist, double radius) {
  const double u = dist / radius;
  const double taper = std::exp(-0.5 * u * u);
  if (taper == 0.0) return 0.0;  // underflown tail; derivative underflows too
  return taper * u * u / radius;
}

MeanKind mean_kind_from_string(std::string_view name) {
  if (name == "min") return MeanKind::Min;
  if (name == "max") return MeanKind::Max;
  if (name == "mean") return MeanKind::Mean;
  if (name == "sqrt") return MeanKind::Sqrt;
  if (name == "rms") return MeanKind::Rms;
  if (name == "harm") return MeanKind::Harm;
  throw std::invalid_argument("unknown mean function '" + std::string(name) +
                              "' (expected min|max|mean|sqrt|rms|harm)");
}

std::string to_string(MeanKind kind) {
  switch (kind) {
    case MeanKind::Min: return "min";
    case MeanKind::Max: return "max";
    case MeanKind::Mean: return "mean";
    case MeanKind::Sqrt: return "sqrt";
    case MeanKind::Rms: return "rms";
    case MeanKind::Harm: return "harm";
  }
  return "?";
}

bool mean_kind_differentiable(MeanKind kind) {
  return kind != MeanKind::Min && kind != MeanKind::Max;
}

double combine(MeanKind kind, double a, double b) {
  if (a == b) return a;  // idempotence, exactly
  switch (kind) {
    case MeanKind::Min: return std::min(a, b);
    case MeanKind::Max: return std::max(a, b);
    case MeanKind::Mean: return 0.5 * (a + b);
    case MeanKind::Sqrt: return std::sqrt(a * b);
    case MeanKind::Rms: return std::sqrt(0.5 * (a * a + b * b));
    case MeanKind::Harm: return (a + b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
  }
  throw std::logic_error("combine: unreachable");
}

namespace {

// d m(a, b) / d a; callers guarantee a differentiable kind and guard the
// degenerate all-zero case through the chain-rule factor being zero.
double combine_da(MeanKind kind, double a, double b) {
  switch (kind) {
    case MeanKind::Mean:
      return 0.5;
    case MeanKind::Sqrt:
      return a > 0.0 ? 0.5 * std::sqrt(b / a) : 0.0;
    case MeanKind::Rms: {
      const double m = std::sqrt(0.5 * (a * a + b * b));
      return m > 0.0 ? 0.5 * a / m : 0.0;
    }
    case MeanKind::Harm: {
      const double s = a + b;
      return s > 0.0 ? 2.0 * b * b / (s * s) : 0.0;
    }
    default:
      throw std::invalid_argument("combine_da: non-differentiable mean kind " + to_string(kind));
  }
}

void require_positive_radii(const Vector& radii, const char* where) {
  if ((radii.array() <= 0.0).any())
    throw std::invalid_argument(std::string(where) + ": radii must be strictly positive");
}

}  // namespace

GroupMapping::GroupMapping(std::vector<int> assignment, int group_count)
    : assignment_(std::move(assignment)), group_count_(group_count) {
  if (group_count_ < 1) throw std::invalid_argument("GroupMapping: need at least one group");
  if (assignment_.empty()) throw std::invalid_argument("GroupMapping: empty assignment");
  std::vector<char> seen(static_cast<size_t>(group_count_), 0);
  for (int g : assignment_) {
    if (g < 0 || g >= group_count_)
      throw std::invalid_argument("GroupMapping: group id out of range");
    seen[static_cast<size_t>(g)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::invalid_argument("GroupMapping: every group must be nonempty");
}

GroupMapping GroupMapping::single(Index n) {
  return GroupMapping(std::vector<int>(static_cast<size_t>(n), 0), 1);
}

GroupMapping GroupMapping::modulo(Index n, Index q) {
  if (q < 1 || n % q != 0) throw std::invalid_argument("GroupMapping::modulo: q must divide n");
  std::vector<int> a(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) a[static_cast<size_t>(i)] = static_cast<int>(i % q);
  return GroupMapping(std::move(a), static_cast<int>(q));
}

GroupMapping GroupMapping::blocks(Index n, Index count) {
  if (count < 1 || count > n)
    throw std::invalid_argument("GroupMapping::blocks: count must be in [1, n]");
  std::vector<int> a(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    a[static_cast<size_t>(i)] = static_cast<int>(std::min(i * count / n, count - 1));
  return GroupMapping(std::move(a), static_cast<int>(count));
}

GroupMapping GroupMapping::per_variable(Index n) {
  std::vector<int> a(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) a[static_cast<size_t>(i)] = static_cast<int>(i);
  return GroupMapping(std::move(a), static_cast<int>(n));
}

Vector prolong(const GroupMapping& mapping, const Vector& upsilon) {
  if (upsilon.size() != mapping.group_count())
    throw std::invalid_argument("prolong: radii length does not match group count");
  Vector r(mapping.state_dim());
  for (Index i = 0; i < mapping.state_dim(); ++i) r[i] = upsilon[mapping.group_of(i)];
  return r;
}

Matrix pairwise_distances(const ModelSystem& model, const std::vector<Index>& rows,
                          const std::vector<Index>& cols) {
  Matrix d(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      d(static_cast<Index>(i), static_cast<Index>(j)) = model.distance(rows[i], cols[j]);
  return d;
}

Matrix build_rho_block(const Matrix& dist, const Vector& radii_rows, const Vector& radii_cols,
                       MeanKind kind) {
  if (dist.rows() != radii_rows.size() || dist.cols() != radii_cols.size())
    throw std::invalid_argument("build_rho_block: distance/radii shape mismatch");
  require_positive_radii(radii_rows, "build_rho_block");
  require_positive_radii(radii_cols, "build_rho_block");
  Matrix rho(dist.rows(), dist.cols());
  for (Index j = 0; j < dist.cols(); ++j) {
    const double rc = radii_cols[j];
    for (Index i = 0; i < dist.rows(); ++i) {
      const double d = dist(i, j);
      rho(i, j) = combine(kind, gauss_loc(d / radii_rows[i]), gauss_loc(d / rc));
    }
  }
  return rho;
}

Matrix build_rho(const ModelSystem& model, const Vector& radii, MeanKind kind) {
  const Index n = model.dim();
  if (radii.size() != n) throw std::invalid_argument("build_rho: radii length != model dim");
  require_positive_radii(radii, "build_rho");
  Matrix rho(n, n);
  for (Index i = 0; i < n; ++i) {
    rho(i, i) = 1.0;  // l(0) = 1 and m is idempotent
    for (Index j = i + 1; j < n; ++j) {
      const double d = model.distance(i, j);
      rho(i, j) = combine(kind, gauss_loc(d / radii[i]), gauss_loc(d / radii[j]));
      rho(j, i) = rho(i, j);
    }
  }
  return rho;
}

Matrix drho_dupsilon_block(const Matrix& dist, const std::vector<int>& row_groups,
                           const std::vector<int>& col_groups, const Vector& upsilon, int group_j,
                           MeanKind kind) {
  if (!mean_kind_differentiable(kind))
    throw std::invalid_argument("drho_dupsilon: non-differentiable combiner " + to_string(kind));
  if (dist.rows() != static_cast<Index>(row_groups.size()) ||
      dist.cols() != static_cast<Index>(col_groups.size()))
    throw std::invalid_argument("drho_dupsilon: distance/group shape mismatch");
  if (group_j < 0 || group_j >= upsilon.size())
    throw std::invalid_argument("drho_dupsilon: group index out of range");
  require_positive_radii(upsilon, "drho_dupsilon");

  Matrix out = Matrix::Zero(dist.rows(), dist.cols());
  for (Index j = 0; j < dist.cols(); ++j) {
    const int gc = col_groups[static_cast<size_t>(j)];
    const double rc = upsilon[gc];
    for (Index i = 0; i < dist.rows(); ++i) {
      const int gr = row_groups[static_cast<size_t>(i)];
      if (gr != group_j && gc != group_j) continue;
      const double d = dist(i, j);
      const double rr = upsilon[gr];
      const double a = gauss_loc(d / rr);
      const double b = gauss_loc(d / rc);
      double v = 0.0;
      if (gr == group_j) {
        const double da = gauss_loc_dradius(d, rr);
        if (da != 0.0) v += combine_da(kind, a, b) * da;
      }
      if (gc == group_j) {
        const double db = gauss_loc_dradius(d, rc);
        if (db != 0.0) v += combine_da(kind, b, a) * db;
      }
      out(i, j) = v;
    }
  }
  return out;
}

Matrix drho_dupsilon(const ModelSystem& model, const GroupMapping& mapping, const Vector& upsilon,
                     int group_j, MeanKind kind) {
  const Index n = model.dim();
  if (mapping.state_dim() != n)
    throw std::invalid_argument("drho_dupsilon: mapping length != model dim");
  std::vector<Index> all(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  return drho_dupsilon_block(pairwise_distances(model, all, all), mapping.assignment(),
                             mapping.assignment(), upsilon, group_j, kind);
}

Matrix localize_cov(const Matrix& rho_block, const Matrix& cov_block) {
  if (rho_block.rows() != cov_block.rows() || rho_block.cols() != cov_block.cols())
    throw std::invalid_argument("localize_cov: shape mismatch");
  return rho_block.cwiseProduct(cov_block);
}

}  // namespace adaloc
