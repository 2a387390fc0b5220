#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adaloc/denkf.hpp"
#include "adaloc/ensemble.hpp"
#include "adaloc/gamma_prior.hpp"
#include "adaloc/integrator.hpp"
#include "adaloc/localization.hpp"
#include "adaloc/model.hpp"

namespace adaloc {

/// Taper choice for the adaptive machinery: mean-function kind plus the
/// assignment of state components to radius groups.
struct LocalizationSpec {
  MeanKind mean_kind = MeanKind::Mean;
  GroupMapping mapping;
};

struct CostParts {
  double forecast_fit = 0.0;  // sum_e 1/2 || S^-1 z_e ||^2 weighted by H Pl H^T
  double obs_fit = 0.0;       // sum_e 1/2 || g_e ||^2 weighted by R^-1
  double prior = 0.0;         // sum_j beta u - (alpha-1) log u
  double total() const { return forecast_fit + obs_fit + prior; }
};

struct CostEvaluation {
  double value = 0.0;
  CostParts parts;
  Vector gradient;  // empty unless requested
};

using Objective = std::function<CostEvaluation(const Vector& upsilon, bool with_gradient)>;

/// MAP cost for the localization radii, evaluated entirely in observation
/// space: no object with both dimensions beyond max(m, N) is formed.
///
/// With Z = d 1^T - 1/2 H X_f, B(u) = rho_obs(u) o (H X_f)(H X_f)^T/(N-1),
/// S = B + R and W = S^-1 Z:
///
///   J(u) = 1/2 sum(W o B W) + 1/2 sum(G o R^-1 G) + prior(u),
///   G = Z - 1/2 H X_f - B W,
///
/// and the gradient contracts dB_j = drho_j o B_raw against W, S^-1 B W and
/// the observation-misfit backsolve. The S^-2 in the closed form is realized
/// as two sequential solves against the same factorization.
class ObsSpaceCost {
 public:
  ObsSpaceCost(const Ensemble& forecast, const Observation& obs, const ObservationOperator& H,
               const ModelSystem& model, const LocalizationSpec& spec, GammaPrior prior);

  CostEvaluation evaluate(const Vector& upsilon, bool with_gradient) const;

  Index groups() const { return prior_.groups(); }
  const GammaPrior& prior() const { return prior_; }

 private:
  Matrix Y_;      // H X_f, m x N
  Matrix Braw_;   // unlocalized H P_f H^T, m x m
  Matrix Z_;      // d 1^T - Y/2, m x N
  Matrix Dobs_;   // pairwise distances between observed components
  Vector rvar_;   // diagonal of R
  std::vector<int> obs_groups_;
  MeanKind kind_;
  GammaPrior prior_;
};

struct OptimizerSettings {
  int max_iters = 50;
  double grad_tol = 1e-6;      // relative to the initial projected gradient
  double upsilon_min = 1e-3;   // lower bound of the feasible box
  double shrink = 0.5;         // backtracking factor
  double armijo_c = 1e-4;      // sufficient-decrease constant
};

struct OptimizerReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::string stop_reason;
  std::vector<double> cost_history;  // non-increasing by construction
};

/// Projected gradient descent with Armijo backtracking on [u_min, inf)^g,
/// started from `start` (Algorithm: the prior mean vector). Guarantees
/// J(result) <= J(start).
Vector minimize_map_radii(const Objective& objective, const Vector& start,
                          const OptimizerSettings& settings, OptimizerReport* report = nullptr);

struct FourDSettings {
  int horizon = 0;              // K future windows; 0 reduces to pure 3D
  double fd_step_scale = 1e-4;  // h_j = scale * max(1, u_j)
};

/// Time-distributed extension: the 3D cost plus, for each of K future
/// windows, the member-wise observation misfit of forecasts launched from
/// the u-dependent analysis. The penalty gradient uses one-sided finite
/// differences (one extra analysis + K-window forecast per group).
class FourDCost {
 public:
  FourDCost(ObsSpaceCost base, const Ensemble& forecast, Observation obs, ObservationOperator H,
            const ModelSystem& model, const LocalizationSpec& spec, FourDSettings settings,
            std::vector<Observation> future_obs, double t_current, double window, double dt);

  CostEvaluation evaluate(const Vector& upsilon, bool with_gradient) const;

  double penalty(const Vector& upsilon) const;

 private:
  ObsSpaceCost base_;
  Ensemble forecast_;
  Observation obs_;
  ObservationOperator H_;
  const ModelSystem* model_;
  LocalizationSpec spec_;
  FourDSettings settings_;
  std::vector<Observation> future_obs_;
  double t_, window_, dt_;
  Matrix dist_state_obs_;
};

struct AdaptiveCycleResult {
  Vector upsilon;       // minimizer, length g
  Vector radii;         // prolonged per-component radii, length n
  RhoBlocks blocks;
  OptimizerReport report;
};

/// One full radius-selection step: build alpha/beta from the prior, minimize
/// the (3D or 4D) cost from the prior mean, prolong the radii and build the
/// taper blocks for the analysis.
AdaptiveCycleResult adaptive_cycle(const GammaPrior& prior, const Ensemble& forecast,
                                   const Observation& obs, const ObservationOperator& H,
                                   const ModelSystem& model, const LocalizationSpec& spec,
                                   const OptimizerSettings& settings,
                                   const FourDSettings* fourd = nullptr,
                                   const std::vector<Observation>* future_obs = nullptr,
                                   double t_current = 0.0, double window = 0.0, double dt = 0.0);

}  // namespace adaloc
