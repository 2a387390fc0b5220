#pragma once

#include <string>
#include <vector>

#include "adaloc/config.hpp"
#include "adaloc/metrics.hpp"
#include "adaloc/oracle.hpp"
#include "adaloc/record.hpp"

namespace adaloc {

/// Synthetic truth trajectory and observation sequence of a twin experiment.
/// truth[k] is the true state at cycle k (truth[0] is the initial state);
/// obs_values[k] is H truth[k] plus Gaussian noise, defined for k >= 1.
/// Adaptive-4D runs get `horizon` extra windows past the last analysis cycle.
struct TruthAndObs {
  std::vector<Vector> truth;
  std::vector<Vector> obs_values;
};

TruthAndObs synthesize_truth_and_obs(const ExperimentConfig& cfg, const ModelSystem& model,
                                     const ObservationOperator& H, const Rng& base_rng,
                                     Index extra_windows = 0);

/// Initial ensemble: Lorenz-type models perturb the initial truth with
/// Gaussian noise of the configured spread; the QG model samples member
/// states from a separate long free run (climatological pool).
Ensemble initial_ensemble(const ExperimentConfig& cfg, const ModelSystem& model,
                          const Vector& truth0, const Rng& base_rng);

/// One full twin experiment: propagate / inflate / select taper / analyze,
/// per cycle, with the mode picked in the config. Divergence (analysis RMSE
/// above divergence_factor * observation std, or a model blow-up) stops the
/// run and keeps the partial record.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

/// Oracle-mode convenience wrapper around run_experiment.
ExperimentRecord oracle_run(const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<SweepRow> rows;       // cartesian product order
  std::vector<SweepRow> best_rows;  // minimal-RMSE row per alpha
};

/// Cartesian sweep over the config lists (alphas x radii for constant runs,
/// alphas x prior offsets x prior variances for adaptive ones). Run i is
/// seeded with seed + i and, when out_dir is nonempty, writes its own CSV
/// and manifest there. Points run on `cfg.workers` threads; results are
/// merged by index so output is independent of scheduling.
SweepResult sweep(const ExperimentConfig& cfg, const std::string& out_dir = "");

/// Write <prefix>.csv, <prefix>_manifest.json and, for oracle runs,
/// <prefix>_oracle_candidates.csv into out_dir.
void write_run_outputs(const std::string& out_dir, const std::string& prefix,
                       const ExperimentRecord& record);

}  // namespace adaloc
