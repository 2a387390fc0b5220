#pragma once

#include <vector>

#include "adaloc/adaptive.hpp"
#include "adaloc/denkf.hpp"

namespace adaloc {

/// Search specification for the idealized (truth-aware) radius selector.
struct OracleSearchSpec {
  bool multivariate = false;
  Vector grid;     // ascending positive radius candidates
  int sweeps = 2;  // coordinate-descent passes over the groups

  static Vector make_grid(double start, double stop, double step);
};

struct OracleSelection {
  Vector upsilon;  // chosen per-group radii
  double rmse = 0.0;
  // Univariate scan table: (radius, analysis RMSE); candidates whose
  // analysis failed are recorded with a NaN RMSE and skipped.
  std::vector<std::pair<double, double>> candidate_rmse;
};

/// Pick the radii minimizing the spatial RMSE of the analysis mean against
/// the known truth. Univariate mode scans the grid exhaustively (ties break
/// toward the smaller radius). Multivariate mode runs coordinate descent
/// over the groups on the same grid, starting from the univariate argmin,
/// so it can never do worse than the uniform solution on the scanned grid.
OracleSelection oracle_select(const Vector& truth, const Ensemble& forecast,
                              const Observation& obs, const ObservationOperator& H,
                              const ModelSystem& model, const LocalizationSpec& spec,
                              const OracleSearchSpec& search);

}  // namespace adaloc
