#include "adaloc/adaptive.hpp"

#include <Eigen/Cholesky>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace adaloc {

namespace {

// Observation-space contract: the cost path may not allocate any matrix with
// both dimensions beyond max(m, N). Debug builds assert it at every
// allocation the evaluation makes.
inline void check_obs_space(const Matrix& mat, Index m, Index N) {
#ifndef NDEBUG
  const Index cap = std::max(m, N);
  assert(!(mat.rows() > cap && mat.cols() > cap) && "observation-space contract violated");
#else
  (void)mat;
  (void)m;
  (void)N;
#endif
}

}  // namespace

ObsSpaceCost::ObsSpaceCost(const Ensemble& forecast, const Observation& obs,
                           const ObservationOperator& H, const ModelSystem& model,
                           const LocalizationSpec& spec, GammaPrior prior)
    : rvar_(obs.error_variances), kind_(spec.mean_kind), prior_(std::move(prior)) {
  if (H.state_dim() != model.dim() || forecast.dim() != model.dim())
    throw std::invalid_argument("ObsSpaceCost: dimension mismatch");
  if (spec.mapping.state_dim() != model.dim())
    throw std::invalid_argument("ObsSpaceCost: group mapping length != model dim");
  if (prior_.groups() != spec.mapping.group_count())
    throw std::invalid_argument("ObsSpaceCost: prior groups != mapping groups");

  const Index N = forecast.size();
  Y_ = project_rows(forecast.anomalies(), H);
  Braw_ = (Y_ * Y_.transpose()) / static_cast<double>(N - 1);
  const Vector d = obs.values - project_to_obs(forecast.mean(), H);
  Z_ = (-0.5 * Y_).colwise() + d;
  Dobs_ = pairwise_distances(model, H.indices(), H.indices());
  obs_groups_.reserve(H.indices().size());
  for (Index idx : H.indices()) obs_groups_.push_back(spec.mapping.group_of(idx));

  check_obs_space(Y_, Y_.rows(), N);
  check_obs_space(Braw_, Y_.rows(), N);
}

CostEvaluation ObsSpaceCost::evaluate(const Vector& upsilon, bool with_gradient) const {
  const Index g = prior_.groups();
  const Index m = Y_.rows();
  const Index N = Y_.cols();
  if (upsilon.size() != g) throw std::invalid_argument("cost: radii length != group count");
  if ((upsilon.array() <= 0.0).any())
    throw std::invalid_argument("cost: radii below the positivity bound");

  Vector radii_obs(m);
  for (Index i = 0; i < m; ++i) radii_obs[i] = upsilon[obs_groups_[static_cast<size_t>(i)]];

  const Matrix rho = build_rho_block(Dobs_, radii_obs, radii_obs, kind_);
  Matrix S = rho.cwiseProduct(Braw_);
  const Matrix B = S;  // H (rho o P) H^T
  S.diagonal() += rvar_;
  check_obs_space(S, m, N);

  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) throw std::runtime_error("cost: S not SPD");

  const Matrix W = llt.solve(Z_);
  const Matrix BW = B * W;
  const Matrix G = Z_ - 0.5 * Y_ - BW;
  const Matrix RinvG = (G.array().colwise() / rvar_.array()).matrix();
  check_obs_space(W, m, N);
  check_obs_space(G, m, N);

  CostEvaluation out;
  out.parts.forecast_fit = 0.5 * W.cwiseProduct(BW).sum();
  out.parts.obs_fit = 0.5 * G.cwiseProduct(RinvG).sum();
  out.parts.prior = prior_.neg_log_term(upsilon);
  out.value = out.parts.total();
  if (!std::isfinite(out.value)) throw std::runtime_error("cost: non-finite value");

  if (with_gradient) {
    if (!mean_kind_differentiable(kind_))
      throw std::invalid_argument("gradient: non-differentiable combiner " + to_string(kind_));
    const Matrix V = llt.solve(BW);
    const Matrix T = llt.solve(B * RinvG) - RinvG;
    check_obs_space(V, m, N);
    check_obs_space(T, m, N);

    out.gradient = prior_.neg_log_gradient(upsilon);
    for (Index j = 0; j < g; ++j) {
      const bool touches_obs =
          std::find(obs_groups_.begin(), obs_groups_.end(), static_cast<int>(j)) !=
          obs_groups_.end();
      if (!touches_obs) continue;  // rho_obs does not depend on this group
      const Matrix drho =
          drho_dupsilon_block(Dobs_, obs_groups_, obs_groups_, upsilon, static_cast<int>(j), kind_);
      const Matrix U = drho.cwiseProduct(Braw_) * W;
      out.gradient[j] += 0.5 * W.cwiseProduct(U).sum() - V.cwiseProduct(U).sum() +
                         T.cwiseProduct(U).sum();
    }
  }
  return out;
}

Vector minimize_map_radii(const Objective& objective, const Vector& start,
                          const OptimizerSettings& settings, OptimizerReport* report) {
  const double lo = settings.upsilon_min;
  Vector x = start.cwiseMax(lo);

  auto projected_gradient = [&](const Vector& point, const Vector& grad) {
    Vector pg = grad;
    for (Index j = 0; j < pg.size(); ++j)
      if (point[j] <= lo && grad[j] > 0.0) pg[j] = 0.0;
    return pg;
  };

  CostEvaluation cur = objective(x, true);
  if (!std::isfinite(cur.value))
    throw std::runtime_error("minimize: non-finite cost at the initial point");

  OptimizerReport rep;
  rep.initial_cost = cur.value;
  rep.cost_history.push_back(cur.value);
  rep.stop_reason = "max-iters";

  Vector pg = projected_gradient(x, cur.gradient);
  const double pg0 = std::max(pg.norm(), 1.0);
  double t = 1.0;

  for (int iter = 0; iter < settings.max_iters; ++iter) {
    if (pg.norm() <= settings.grad_tol * pg0) {
      rep.stop_reason = "gradient";
      break;
    }

    bool accepted = false;
    Vector candidate;
    double candidate_value = 0.0;
    while (true) {
      candidate = (x - t * cur.gradient).cwiseMax(lo);
      const Vector step = candidate - x;
      const double step_size = step.cwiseAbs().maxCoeff();
      if (step_size < 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) break;  // collapsed
      double value;
      try {
        value = objective(candidate, false).value;
      } catch (const std::exception&) {
        value = std::numeric_limits<double>::infinity();  // infeasible trial, shrink
      }
      if (std::isfinite(value) &&
          value <= cur.value + settings.armijo_c * cur.gradient.dot(step)) {
        accepted = true;
        candidate_value = value;
        break;
      }
      t *= settings.shrink;
    }
    if (!accepted) {
      rep.stop_reason = "step-collapse";
      break;
    }

    x = candidate;
    cur = objective(x, true);
    cur.value = candidate_value;  // same point, value already computed in the search
    rep.cost_history.push_back(cur.value);
    ++rep.iterations;
    pg = projected_gradient(x, cur.gradient);
    t = std::min(t * 2.0, 1e12);
  }

  rep.final_cost = cur.value;
  if (report) *report = rep;
  return x;
}

FourDCost::FourDCost(ObsSpaceCost base, const Ensemble& forecast, Observation obs,
                     ObservationOperator H, const ModelSystem& model,
                     const LocalizationSpec& spec, FourDSettings settings,
                     std::vector<Observation> future_obs, double t_current, double window,
                     double dt)
    : base_(std::move(base)),
      forecast_(forecast),
      obs_(std::move(obs)),
      H_(std::move(H)),
      model_(&model),
      spec_(spec),
      settings_(settings),
      future_obs_(std::move(future_obs)),
      t_(t_current),
      window_(window),
      dt_(dt) {
  if (settings_.horizon < 0) throw std::invalid_argument("FourDCost: horizon must be >= 0");
  if (settings_.horizon > static_cast<int>(future_obs_.size()))
    throw std::invalid_argument("FourDCost: horizon exceeds available future observations");
  if (settings_.horizon > 0 && !(window_ > 0))
    throw std::invalid_argument("FourDCost: window must be positive");
  std::vector<Index> all(static_cast<size_t>(model.dim()));
  for (Index i = 0; i < model.dim(); ++i) all[static_cast<size_t>(i)] = i;
  dist_state_obs_ = pairwise_distances(model, all, H_.indices());
}

double FourDCost::penalty(const Vector& upsilon) const {
  const Vector radii = prolong(spec_.mapping, upsilon);
  const RhoBlocks blocks = build_rho_blocks(dist_state_obs_, H_.indices(), radii, spec_.mean_kind);
  Ensemble ens = denkf_analysis(forecast_, obs_, H_, blocks);

  double pen = 0.0;
  for (int k = 1; k <= settings_.horizon; ++k) {
    const double t0 = t_ + (k - 1) * window_;
    ens = propagate(*model_, ens, t0, t_ + k * window_, dt_);
    const Observation& y = future_obs_[static_cast<size_t>(k - 1)];
    const Matrix Yk = project_to_obs(ens, H_);
    const Matrix resid = (-Yk).colwise() + y.values;
    const Matrix rinv_resid = (resid.array().colwise() / y.error_variances.array()).matrix();
    pen += 0.5 * resid.cwiseProduct(rinv_resid).sum();
  }
  return pen;
}

CostEvaluation FourDCost::evaluate(const Vector& upsilon, bool with_gradient) const {
  CostEvaluation out = base_.evaluate(upsilon, with_gradient);
  if (settings_.horizon == 0) return out;  // bitwise-identical to the 3D cost

  const double pen = penalty(upsilon);
  out.parts.obs_fit += pen;  // future windows are observation misfit
  out.value = out.parts.total();

  if (with_gradient) {
    for (Index j = 0; j < upsilon.size(); ++j) {
      const double h = settings_.fd_step_scale * std::max(1.0, upsilon[j]);
      Vector up = upsilon;
      up[j] += h;
      out.gradient[j] += (penalty(up) - pen) / h;
    }
  }
  return out;
}

AdaptiveCycleResult adaptive_cycle(const GammaPrior& prior, const Ensemble& forecast,
                                   const Observation& obs, const ObservationOperator& H,
                                   const ModelSystem& model, const LocalizationSpec& spec,
                                   const OptimizerSettings& settings, const FourDSettings* fourd,
                                   const std::vector<Observation>* future_obs, double t_current,
                                   double window, double dt) {
  ObsSpaceCost base(forecast, obs, H, model, spec, prior);

  Objective objective;
  std::optional<FourDCost> fourd_cost;
  if (fourd && fourd->horizon > 0) {
    fourd_cost.emplace(std::move(base), forecast, obs, H, model, spec, *fourd,
                       future_obs ? *future_obs : std::vector<Observation>{}, t_current, window,
                       dt);
    objective = [&](const Vector& u, bool grad) { return fourd_cost->evaluate(u, grad); };
  } else {
    objective = [&, base = std::move(base)](const Vector& u, bool grad) {
      return base.evaluate(u, grad);
    };
  }

  AdaptiveCycleResult result;
  result.upsilon =
      minimize_map_radii(objective, prior.mean().cwiseMax(settings.upsilon_min), settings,
                         &result.report);
  result.radii = prolong(spec.mapping, result.upsilon);
  result.blocks = build_rho_blocks(model, H, result.radii, spec.mean_kind);
  return result;
}

}  // namespace adaloc
