#pragma once

#include <vector>

#include "adaloc/types.hpp"

namespace adaloc {

/// Root mean square difference over components of a single state pair.
double spatial_rmse(const Vector& a, const Vector& b);

/// Spatio-temporally averaged RMSE of two equal-length state traces over the
/// half-open cycle window [begin, end):
/// sqrt( (1/(n*n_t)) sum_cycles sum_components (a - b)^2 ).
double compute_rmse(const std::vector<Vector>& truth, const std::vector<Vector>& estimate,
                    std::size_t begin, std::size_t end);

}  // namespace adaloc
