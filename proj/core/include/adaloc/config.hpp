#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaloc/adaptive.hpp"
#include "adaloc/lorenz96.hpp"
#include "adaloc/qg.hpp"

namespace adaloc {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ModelKind { Lorenz96, MultivariateLorenz96, QuasiGeostrophic };
enum class LocalizationMode { Constant, Adaptive3D, Adaptive4D, Oracle };

std::string to_string(ModelKind kind);
std::string to_string(LocalizationMode mode);

struct GroupSpec {
  enum class Kind { Single, Mod, Blocks, PerVariable, Explicit };
  Kind kind = Kind::Single;
  Index q = 4;          // Mod
  Index count = 4;      // Blocks
  std::vector<int> assignment;  // Explicit, 0-based group ids
};

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> radii;               // constant mode
  std::vector<double> prior_mean_offsets;  // adaptive modes
  std::vector<double> prior_variances;
};

struct OracleConfig {
  double grid_start = 0.5;
  double grid_stop = 16.0;
  double grid_step = 0.5;
  bool multivariate = false;
  int sweeps = 2;
};

/// Full twin-experiment description. Everything an experiment run reads is
/// here; the resolved form (all defaults filled) is echoed to the manifest.
struct ExperimentConfig {
  std::uint64_t seed = 0;

  ModelKind model_kind = ModelKind::Lorenz96;
  Lorenz96Config l96;
  MultivariateLorenz96Config ml96;
  QGConfig qg;

  Index ensemble_size = 10;
  double init_spread = -1.0;          // < 0: default to the observation std
  Index init_free_run_windows = 100;  // QG climatological pool length

  std::vector<Index> obs_indices;  // 1-based; empty if stride-generated
  Index sublattice_stride = 0;     // QG regular sub-lattice (both grid axes)
  std::vector<double> obs_variance{1.0};  // scalar broadcast or length m
  double window = 0.05;

  Index cycles = 1100;
  Index spinup = 100;
  double inflation = 1.0;
  double divergence_factor = 10.0;

  LocalizationMode mode = LocalizationMode::Constant;
  MeanKind mean_kind = MeanKind::Mean;
  GroupSpec groups;
  double radius = 4.0;                      // constant mode
  std::vector<double> prior_mean{4.0};      // scalar broadcast or length g
  std::vector<double> prior_variance{1.0};  // scalar broadcast or length g
  OptimizerSettings optimizer;
  int horizon = 1;               // K for adaptive-4d
  double fd_step_scale = 1e-4;
  Index warm_start_cycles = 0;
  double warm_start_radius = -1.0;  // < 0: prior mean (adaptive) or radius
  OracleConfig oracle;

  SweepSpec sweep;
  int workers = 1;
  std::string output_prefix = "experiment";
};

/// Parse and validate. Unknown keys, type errors and inconsistent values are
/// rejected; messages carry a line number where one can be attributed.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Resolved-config echo (defaults filled in), pretty JSON.
std::string resolved_config_json(const ExperimentConfig& cfg);

std::unique_ptr<ModelSystem> make_model(const ExperimentConfig& cfg);
ObservationOperator make_observation_operator(const ExperimentConfig& cfg,
                                              const ModelSystem& model);
GroupMapping make_group_mapping(const GroupSpec& spec, Index n);

/// Observation variances broadcast to the operator size.
Vector resolve_obs_variances(const ExperimentConfig& cfg, Index obs_dim);

}  // namespace adaloc
