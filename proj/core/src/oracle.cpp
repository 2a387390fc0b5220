#include "adaloc/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "adaloc/metrics.hpp"

namespace adaloc {

Vector OracleSearchSpec::make_grid(double start, double stop, double step) {
  if (!(start > 0) || !(step > 0) || stop < start)
    throw std::invalid_argument("oracle grid: need 0 < start <= stop and step > 0");
  std::vector<double> values;
  for (double r = start; r <= stop + 1e-12 * step; r += step) values.push_back(r);
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

namespace {

constexpr double kFailed = std::numeric_limits<double>::quiet_NaN();

double try_candidate(const Vector& truth, const Ensemble& forecast, const Observation& obs,
                     const ObservationOperator& H, const Matrix& dist_state_obs,
                     const LocalizationSpec& spec, const Vector& upsilon) {
  try {
    const Vector radii = prolong(spec.mapping, upsilon);
    const RhoBlocks blocks =
        build_rho_blocks(dist_state_obs, H.indices(), radii, spec.mean_kind);
    const Ensemble analysis = denkf_analysis(forecast, obs, H, blocks);
    return spatial_rmse(analysis.mean(), truth);
  } catch (const std::exception&) {
    return kFailed;
  }
}

}  // namespace

OracleSelection oracle_select(const Vector& truth, const Ensemble& forecast,
                              const Observation& obs, const ObservationOperator& H,
                              const ModelSystem& model, const LocalizationSpec& spec,
                              const OracleSearchSpec& search) {
  if (search.grid.size() == 0) throw std::invalid_argument("oracle_select: empty grid");
  const Index g = spec.mapping.group_count();

  std::vector<Index> all(static_cast<size_t>(model.dim()));
  for (Index i = 0; i < model.dim(); ++i) all[static_cast<size_t>(i)] = i;
  const Matrix dist_state_obs = pairwise_distances(model, all, H.indices());

  OracleSelection sel;
  sel.candidate_rmse.reserve(static_cast<size_t>(search.grid.size()));

  // Exhaustive univariate scan; ties break toward the smaller radius.
  double best_rmse = std::numeric_limits<double>::infinity();
  double best_radius = 0.0;
  for (Index c = 0; c < search.grid.size(); ++c) {
    const double r = search.grid[c];
    const double rmse = try_candidate(truth, forecast, obs, H, dist_state_obs, spec,
                                      Vector::Constant(g, r));
    sel.candidate_rmse.emplace_back(r, rmse);
    if (std::isnan(rmse)) continue;
    if (rmse < best_rmse) {
      best_rmse = rmse;
      best_radius = r;
    }
  }
  if (!std::isfinite(best_rmse))
    throw std::runtime_error("oracle_select: analysis failed at every grid radius");

  sel.upsilon = Vector::Constant(g, best_radius);
  sel.rmse = best_rmse;
  if (!search.multivariate || g == 1) return sel;

  // Coordinate descent from the uniform optimum; accepts strict improvements
  // only, so no sweep can increase the objective.
  for (int sweep = 0; sweep < search.sweeps; ++sweep) {
    for (Index j = 0; j < g; ++j) {
      for (Index c = 0; c < search.grid.size(); ++c) {
        const double r = search.grid[c];
        if (r == sel.upsilon[j]) continue;
        Vector trial = sel.upsilon;
        trial[j] = r;
        const double rmse =
            try_candidate(truth, forecast, obs, H, dist_state_obs, spec, trial);
        if (!std::isnan(rmse) && rmse < sel.rmse) {
          sel.rmse = rmse;
          sel.upsilon[j] = r;
        }
      }
    }
  }
  return sel;
}

}  // namespace adaloc
