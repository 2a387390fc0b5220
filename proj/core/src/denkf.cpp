#include "adaloc/denkf.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace adaloc {

RhoBlocks build_rho_blocks(const Matrix& dist_state_obs, const std::vector<Index>& obs_indices,
                           const Vector& radii, MeanKind kind) {
  const Index m = static_cast<Index>(obs_indices.size());
  Vector radii_obs(m);
  for (Index k = 0; k < m; ++k) radii_obs[k] = radii[obs_indices[static_cast<size_t>(k)]];

  RhoBlocks blocks;
  blocks.state_obs = build_rho_block(dist_state_obs, radii, radii_obs, kind);
  blocks.obs_obs.resize(m, m);
  for (Index k = 0; k < m; ++k)
    blocks.obs_obs.row(k) = blocks.state_obs.row(obs_indices[static_cast<size_t>(k)]);
  return blocks;
}

RhoBlocks build_rho_blocks(const ModelSystem& model, const ObservationOperator& H,
                           const Vector& radii, MeanKind kind) {
  std::vector<Index> all(static_cast<size_t>(model.dim()));
  for (Index i = 0; i < model.dim(); ++i) all[static_cast<size_t>(i)] = i;
  return build_rho_blocks(pairwise_distances(model, all, H.indices()), H.indices(), radii, kind);
}

RhoBlocks identity_rho_blocks(Index state_dim, Index obs_dim) {
  return RhoBlocks{Matrix::Ones(state_dim, obs_dim), Matrix::Ones(obs_dim, obs_dim)};
}

Vector innovation(const Vector& forecast_mean, const Observation& obs,
                  const ObservationOperator& H) {
  if (obs.values.size() != H.obs_dim())
    throw std::invalid_argument("innovation: observation length != operator size");
  return obs.values - project_to_obs(forecast_mean, H);
}

Ensemble denkf_analysis(const Ensemble& forecast, const Observation& obs,
                        const ObservationOperator& H, const RhoBlocks& rho,
                        AnalysisDiagnostics* diag) {
  const Index n = forecast.dim();
  const Index N = forecast.size();
  const Index m = H.obs_dim();
  if (H.state_dim() != n) throw std::invalid_argument("denkf_analysis: operator/state mismatch");
  if (obs.values.size() != m) throw std::invalid_argument("denkf_analysis: observation mismatch");
  if (rho.state_obs.rows() != n || rho.state_obs.cols() != m || rho.obs_obs.rows() != m ||
      rho.obs_obs.cols() != m)
    throw std::invalid_argument("denkf_analysis: rho block shapes inconsistent");

  const Matrix& X = forecast.anomalies();       // n x N
  const Matrix Y = project_rows(X, H);          // m x N
  const double scale = 1.0 / static_cast<double>(N - 1);

  // Localized covariance blocks, never the full P.
  const Matrix PHt = rho.state_obs.cwiseProduct(scale * (X * Y.transpose()));  // n x m
  Matrix S = rho.obs_obs.cwiseProduct(scale * (Y * Y.transpose()));            // m x m
  S.diagonal() += obs.error_variances;

  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("denkf_analysis: S not SPD (broken localization or variances)");

  const Vector d = obs.values - project_to_obs(forecast.mean(), H);
  const Vector wd = llt.solve(d);
  const Matrix wY = llt.solve(Y);

  const Vector mean_increment = PHt * wd;
  const Matrix anomaly_update = 0.5 * (PHt * wY);

  Matrix analysis = (X - anomaly_update).colwise() + (forecast.mean() + mean_increment);

  if (diag) {
    diag->innovation = d;
    diag->mean_increment_norm = mean_increment.norm();
    diag->anomaly_update_norm = anomaly_update.norm();
  }
  return Ensemble(std::move(analysis));
}

}  // namespace adaloc
