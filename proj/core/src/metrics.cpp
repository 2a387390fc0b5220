#include "adaloc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace adaloc {

double spatial_rmse(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spatial_rmse: length mismatch");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double compute_rmse(const std::vector<Vector>& truth, const std::vector<Vector>& estimate,
                    std::size_t begin, std::size_t end) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("compute_rmse: trace lengths differ");
  if (begin >= end || end > truth.size()) throw std::invalid_argument("compute_rmse: empty or out-of-range window");
  double accum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = begin; k < end; ++k) {
    if (truth[k].size() != estimate[k].size())
      throw std::invalid_argument("compute_rmse: state lengths differ");
    accum += (truth[k] - estimate[k]).squaredNorm();
    count += static_cast<std::size_t>(truth[k].size());
  }
  return std::sqrt(accum / static_cast<double>(count));
}

}  // namespace adaloc
