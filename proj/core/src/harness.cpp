#include "adaloc/harness.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include "adaloc/denkf.hpp"
#include "adaloc/integrator.hpp"

namespace adaloc {

namespace {

double mean_obs_variance(const ExperimentConfig& cfg) {
  return std::accumulate(cfg.obs_variance.begin(), cfg.obs_variance.end(), 0.0) /
         static_cast<double>(cfg.obs_variance.size());
}

std::vector<double> broadcast_to_groups(const std::vector<double>& values, Index g,
                                        const char* what) {
  if (values.size() == 1) return std::vector<double>(static_cast<size_t>(g), values.front());
  if (static_cast<Index>(values.size()) != g)
    throw ConfigError(std::string("config error: ") + what + " list length != group count");
  return values;
}

GammaPrior make_prior(const ExperimentConfig& cfg, Index g) {
  const auto mean = broadcast_to_groups(cfg.prior_mean, g, "prior_mean");
  const auto var = broadcast_to_groups(cfg.prior_variance, g, "prior_variance");
  return GammaPrior(Eigen::Map<const Vector>(mean.data(), g),
                    Eigen::Map<const Vector>(var.data(), g));
}

}  // namespace

TruthAndObs synthesize_truth_and_obs(const ExperimentConfig& cfg, const ModelSystem& model,
                                     const ObservationOperator& H, const Rng& base_rng,
                                     Index extra_windows) {
  Rng truth_rng = base_rng.substream("truth-init");
  Rng obs_rng = base_rng.substream("obs-noise");

  const Index total = cfg.cycles + extra_windows;
  const double dt = model.default_timestep();
  const Vector noise_std = resolve_obs_variances(cfg, H.obs_dim()).cwiseSqrt();

  TruthAndObs out;
  out.truth.reserve(static_cast<size_t>(total) + 1);
  out.truth.push_back(model.initial_condition(truth_rng));
  out.obs_values.resize(static_cast<size_t>(total) + 1);

  for (Index k = 1; k <= total; ++k) {
    const double t0 = static_cast<double>(k - 1) * cfg.window;
    const double t1 = static_cast<double>(k) * cfg.window;
    out.truth.push_back(integrate(model, out.truth.back(), t0, t1, dt));
    out.obs_values[static_cast<size_t>(k)] =
        project_to_obs(out.truth.back(), H) +
        noise_std.cwiseProduct(obs_rng.normal_vector(H.obs_dim()));
  }
  return out;
}

Ensemble initial_ensemble(const ExperimentConfig& cfg, const ModelSystem& model,
                          const Vector& truth0, const Rng& base_rng) {
  const Index n = model.dim();
  const Index N = cfg.ensemble_size;
  Rng ens_rng = base_rng.substream("init-ens");

  if (cfg.model_kind == ModelKind::QuasiGeostrophic) {
    // Climatological pool: snapshots of a separate free run, one per window.
    const Index W = cfg.init_free_run_windows;
    if (W < N)
      throw ConfigError("config error: init_free_run_windows must be >= ensemble size");
    Rng pool_rng = base_rng.substream("climatology-init");
    Vector state = model.initial_condition(pool_rng);
    const double dt = model.default_timestep();
    std::vector<Vector> pool;
    pool.reserve(static_cast<size_t>(W));
    for (Index w = 0; w < W; ++w) {
      const double t0 = static_cast<double>(w) * cfg.window;
      state = integrate(model, std::move(state), t0, t0 + cfg.window, dt);
      pool.push_back(state);
    }
    // Partial Fisher-Yates: first N entries of a seeded shuffle.
    std::vector<Index> order(static_cast<size_t>(W));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = 0; i < N; ++i) {
      const auto pick = i + static_cast<Index>(ens_rng.uniform_index(static_cast<std::uint64_t>(W - i)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(pick)]);
    }
    Matrix members(n, N);
    for (Index e = 0; e < N; ++e) members.col(e) = pool[static_cast<size_t>(order[static_cast<size_t>(e)])];
    return Ensemble(std::move(members));
  }

  const double spread =
      cfg.init_spread >= 0 ? cfg.init_spread : std::sqrt(mean_obs_variance(cfg));
  Matrix members(n, N);
  for (Index e = 0; e < N; ++e) members.col(e) = truth0 + spread * ens_rng.normal_vector(n);
  return Ensemble(std::move(members));
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
  const auto model = make_model(cfg);
  const ObservationOperator H = make_observation_operator(cfg, *model);
  const Index n = model->dim();
  const Index m = H.obs_dim();
  const Vector rvar = resolve_obs_variances(cfg, m);
  const double dt = model->default_timestep();
  const double divergence_threshold = cfg.divergence_factor * std::sqrt(rvar.mean());

  const Rng rng(cfg.seed);
  const Index extra = cfg.mode == LocalizationMode::Adaptive4D ? cfg.horizon : 0;
  const TruthAndObs data = synthesize_truth_and_obs(cfg, *model, H, rng, extra);
  Ensemble ens = initial_ensemble(cfg, *model, data.truth.front(), rng);

  const GroupMapping mapping = make_group_mapping(cfg.groups, n);
  const Index g = mapping.group_count();
  const LocalizationSpec spec{cfg.mean_kind, mapping};
  const bool adaptive =
      cfg.mode == LocalizationMode::Adaptive3D || cfg.mode == LocalizationMode::Adaptive4D;

  std::optional<GammaPrior> prior;
  if (adaptive) prior.emplace(make_prior(cfg, g));

  std::optional<RhoBlocks> fixed_blocks;  // constant mode and warm-start cycles
  Vector fixed_radii;
  if (cfg.mode == LocalizationMode::Constant || cfg.warm_start_cycles > 0) {
    double r = cfg.radius;
    if (adaptive)
      r = cfg.warm_start_radius > 0 ? cfg.warm_start_radius : prior->mean().mean();
    fixed_radii = Vector::Constant(g, r);
    fixed_blocks = build_rho_blocks(*model, H, Vector::Constant(n, r), cfg.mean_kind);
  }

  OracleSearchSpec oracle_spec;
  if (cfg.mode == LocalizationMode::Oracle) {
    oracle_spec.multivariate = cfg.oracle.multivariate;
    oracle_spec.sweeps = cfg.oracle.sweeps;
    oracle_spec.grid = OracleSearchSpec::make_grid(cfg.oracle.grid_start, cfg.oracle.grid_stop,
                                                   cfg.oracle.grid_step);
  }

  FourDSettings fourd{cfg.horizon, cfg.fd_step_scale};

  ExperimentRecord record;
  record.seed = cfg.seed;
  record.manifest_json = resolved_config_json(cfg);

  for (Index k = 1; k <= cfg.cycles; ++k) {
    const double t0 = static_cast<double>(k - 1) * cfg.window;
    const double t1 = static_cast<double>(k) * cfg.window;
    const Vector& truth_k = data.truth[static_cast<size_t>(k)];

    CycleRecord cyc;
    cyc.cycle = k;
    cyc.time = t1;
    cyc.cost = std::numeric_limits<double>::quiet_NaN();

    try {
      Ensemble forecast = propagate(*model, ens, t0, t1, dt);
      cyc.rmse_forecast = spatial_rmse(forecast.mean(), truth_k);
      if (cfg.inflation > 1.0) forecast = inflate(forecast, cfg.inflation);
      const Observation obs(data.obs_values[static_cast<size_t>(k)], rvar);

      const RhoBlocks* blocks = nullptr;
      RhoBlocks scratch;
      if (cfg.mode == LocalizationMode::Constant ||
          (adaptive && k <= cfg.warm_start_cycles)) {
        blocks = &*fixed_blocks;
        cyc.radii = cfg.mode == LocalizationMode::Constant ? Vector::Constant(g, cfg.radius)
                                                           : fixed_radii;
        if (adaptive) record.initial_costs.push_back(std::numeric_limits<double>::quiet_NaN());
      } else if (cfg.mode == LocalizationMode::Oracle) {
        const OracleSelection sel =
            oracle_select(truth_k, forecast, obs, H, *model, spec, oracle_spec);
        for (const auto& [radius, rmse] : sel.candidate_rmse)
          record.oracle_table.emplace_back(k, radius, rmse);
        scratch = build_rho_blocks(*model, H, prolong(mapping, sel.upsilon), cfg.mean_kind);
        blocks = &scratch;
        cyc.radii = sel.upsilon;
        cyc.cost = sel.rmse;
      } else {
        std::vector<Observation> future;
        if (cfg.mode == LocalizationMode::Adaptive4D) {
          future.reserve(static_cast<size_t>(cfg.horizon));
          for (Index i = 1; i <= cfg.horizon; ++i)
            future.emplace_back(data.obs_values[static_cast<size_t>(k + i)], rvar);
        }
        const AdaptiveCycleResult sel = adaptive_cycle(
            *prior, forecast, obs, H, *model, spec, cfg.optimizer,
            cfg.mode == LocalizationMode::Adaptive4D ? &fourd : nullptr,
            future.empty() ? nullptr : &future, t1, cfg.window, dt);
        scratch = sel.blocks;
        blocks = &scratch;
        cyc.radii = sel.upsilon;
        cyc.cost = sel.report.final_cost;
        cyc.iters = sel.report.iterations;
        record.initial_costs.push_back(sel.report.initial_cost);
      }

      ens = denkf_analysis(forecast, obs, H, *blocks);
      cyc.rmse_analysis = spatial_rmse(ens.mean(), truth_k);
    } catch (const BlowUpError& err) {
      record.diverged = true;
      record.diverged_at = k;
      record.divergence_reason = err.what();
      break;
    }

    record.cycles.push_back(cyc);
    record.truth_trace.push_back(truth_k);
    record.analysis_trace.push_back(ens.mean());

    if (cyc.rmse_analysis > divergence_threshold) {
      record.diverged = true;
      record.diverged_at = k;
      record.divergence_reason =
          "analysis RMSE " + format_double(cyc.rmse_analysis) + " above threshold " +
          format_double(divergence_threshold);
      break;
    }
  }

  const Index done = static_cast<Index>(record.cycles.size());
  if (done > cfg.spinup)
    record.aggregate_rmse = compute_rmse(record.truth_trace, record.analysis_trace,
                                         static_cast<size_t>(cfg.spinup),
                                         static_cast<size_t>(done));
  return record;
}

ExperimentRecord oracle_run(const ExperimentConfig& cfg) {
  if (cfg.mode != LocalizationMode::Oracle)
    throw ConfigError("oracle_run: config localization.mode must be 'oracle'");
  return run_experiment(cfg);
}

void write_run_outputs(const std::string& out_dir, const std::string& prefix,
                       const ExperimentRecord& record) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / (prefix + ".csv"));
    write_run_csv(csv, record);
  }
  {
    std::ofstream manifest(fs::path(out_dir) / (prefix + "_manifest.json"));
    manifest << record.manifest_json << '\n';
  }
  if (!record.oracle_table.empty()) {
    std::ofstream table(fs::path(out_dir) / (prefix + "_oracle_candidates.csv"));
    write_oracle_table_csv(table, record);
  }
}

namespace {

struct SweepPoint {
  double alpha;
  double radius_or_mean_offset;
  double prior_var;
};

}  // namespace

SweepResult sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  const bool constant = cfg.mode == LocalizationMode::Constant;
  const bool oracle = cfg.mode == LocalizationMode::Oracle;

  std::vector<double> alphas = cfg.sweep.alphas.empty() ? std::vector<double>{cfg.inflation}
                                                        : cfg.sweep.alphas;
  std::vector<double> seconds;
  std::vector<double> variances{0.0};
  if (constant)
    seconds = cfg.sweep.radii.empty() ? std::vector<double>{cfg.radius} : cfg.sweep.radii;
  else if (oracle)
    seconds = {0.0};
  else {
    seconds = cfg.sweep.prior_mean_offsets.empty() ? std::vector<double>{0.0}
                                                   : cfg.sweep.prior_mean_offsets;
    variances = cfg.sweep.prior_variances.empty()
                    ? std::vector<double>{cfg.prior_variance.front()}
                    : cfg.sweep.prior_variances;
  }

  std::vector<SweepPoint> points;
  for (double a : alphas)
    for (double s : seconds)
      for (double v : variances) points.push_back({a, s, v});

  std::vector<SweepRow> rows(points.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      ExperimentConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
      run_cfg.inflation = points[i].alpha;
      run_cfg.sweep = SweepSpec{};

      SweepRow row;
      row.index = static_cast<Index>(i);
      row.alpha = points[i].alpha;
      row.seed = run_cfg.seed;
      if (constant) {
        run_cfg.radius = points[i].radius_or_mean_offset;
        row.prior_mean = run_cfg.radius;
        row.prior_var = 0.0;
      } else if (!oracle) {
        std::vector<double> mean = cfg.prior_mean;
        for (double& mval : mean) mval += points[i].radius_or_mean_offset;
        run_cfg.prior_mean = mean;
        run_cfg.prior_variance = {points[i].prior_var};
        row.prior_mean = mean.front();
        row.prior_var = points[i].prior_var;
      }

      try {
        const ExperimentRecord record = run_experiment(run_cfg);
        row.aggregate_rmse = record.aggregate_rmse;
        row.diverged = record.diverged;
        if (!out_dir.empty()) {
          char suffix[16];
          std::snprintf(suffix, sizeof(suffix), "_%03zu", i);
          write_run_outputs(out_dir, cfg.output_prefix + suffix, record);
        }
      } catch (const std::exception&) {
        row.diverged = true;  // a failing point must not poison its siblings
      }
      rows[i] = row;
    }
  };

  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(points.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  SweepResult result;
  result.rows = std::move(rows);
  result.best_rows = best_per_alpha(result.rows);
  return result;
}

}  // namespace adaloc
