#pragma once

#include "adaloc/ensemble.hpp"
#include "adaloc/localization.hpp"

namespace adaloc {

/// Taper matrix restricted to the blocks the analysis needs. The full n x n
/// rho (and the full covariance) is never formed on the filter path.
struct RhoBlocks {
  Matrix state_obs;  // n x m: rho at (state row, observed column)
  Matrix obs_obs;    // m x m: rho restricted to observed rows and columns
};

/// Blocks for per-component radii (length n). obs_obs is sliced out of
/// state_obs so the two blocks are always mutually consistent.
RhoBlocks build_rho_blocks(const ModelSystem& model, const ObservationOperator& H,
                           const Vector& radii, MeanKind kind);

/// As above but with precomputed distance blocks (fixed H fast path).
RhoBlocks build_rho_blocks(const Matrix& dist_state_obs, const std::vector<Index>& obs_indices,
                           const Vector& radii, MeanKind kind);

/// All-ones blocks: no localization.
RhoBlocks identity_rho_blocks(Index state_dim, Index obs_dim);

/// d = y - H xbar.
Vector innovation(const Vector& forecast_mean, const Observation& obs,
                  const ObservationOperator& H);

struct AnalysisDiagnostics {
  Vector innovation;
  double mean_increment_norm = 0.0;
  double anomaly_update_norm = 0.0;
};

/// Deterministic EnKF analysis with Schur-localized covariance:
///
///   xbar_a = xbar_f + K d,   X_a = X_f - (1/2) K H X_f,
///   K = Pl H^T (H Pl H^T + R)^{-1},   Pl = rho o P_f.
///
/// Everything is assembled in observation space: Pl H^T from anomalies and
/// the state_obs taper rows, S = H Pl H^T + R from the obs_obs block. S is
/// factored once (LLT) and never inverted explicitly.
Ensemble denkf_analysis(const Ensemble& forecast, const Observation& obs,
                        const ObservationOperator& H, const RhoBlocks& rho,
                        AnalysisDiagnostics* diag = nullptr);

}  // namespace adaloc
