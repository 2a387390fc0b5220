#include "adaloc/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace adaloc {

using nlohmann::json;

namespace {

// Best-effort line attribution: first occurrence of the quoted key.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return -1;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

[[noreturn]] void fail(const std::string& text, const std::string& key, const std::string& msg) {
  const int line = line_of_key(text, key);
  std::ostringstream os;
  os << "config error";
  if (line > 0) os << " (line " << line << ")";
  os << ": " << msg;
  throw ConfigError(os.str());
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed, const std::string& text) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end())
      fail(text, item.key(), "unknown key '" + item.key() + "' in " + where);
  }
}

double get_num(const json& obj, const char* key, double fallback, const std::string& text) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(text, key, std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

Index get_int(const json& obj, const char* key, Index fallback, const std::string& text) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) fail(text, key, std::string("'") + key + "' must be an integer");
  return obj[key].get<Index>();
}

std::string get_str(const json& obj, const char* key, const std::string& fallback,
                    const std::string& text) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) fail(text, key, std::string("'") + key + "' must be a string");
  return obj[key].get<std::string>();
}

std::vector<double> get_num_list(const json& obj, const char* key, const std::string& text) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  if (obj[key].is_number()) {
    out.push_back(obj[key].get<double>());
    return out;
  }
  if (!obj[key].is_array()) fail(text, key, std::string("'") + key + "' must be a number or array");
  for (const auto& v : obj[key]) {
    if (!v.is_number()) fail(text, key, std::string("'") + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Lorenz96: return "lorenz96";
    case ModelKind::MultivariateLorenz96: return "mlorenz96";
    case ModelKind::QuasiGeostrophic: return "qg";
  }
  return "?";
}

std::string to_string(LocalizationMode mode) {
  switch (mode) {
    case LocalizationMode::Constant: return "constant";
    case LocalizationMode::Adaptive3D: return "adaptive-3d";
    case LocalizationMode::Adaptive4D: return "adaptive-4d";
    case LocalizationMode::Oracle: return "oracle";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    // byte offset -> line number
    const size_t pos = std::min(err.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
    throw ConfigError("config error (line " + std::to_string(line) + "): " + err.what());
  }
  if (!root.is_object()) throw ConfigError("config error: top level must be an object");
  check_keys(root, "top level",
             {"seed", "model", "ensemble", "observations", "filter", "localization", "sweep",
              "output"},
             text);

  ExperimentConfig cfg;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
      fail(text, "seed", "'seed' must be a non-negative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  // model
  if (!root.contains("model")) throw ConfigError("config error: missing 'model' section");
  const json& jm = root["model"];
  const std::string kind = get_str(jm, "kind", "", text);
  if (kind == "lorenz96") {
    cfg.model_kind = ModelKind::Lorenz96;
    check_keys(jm, "model", {"kind", "n", "forcing", "dt"}, text);
    cfg.l96.n = get_int(jm, "n", 40, text);
    cfg.l96.forcing = get_num(jm, "forcing", 8.0, text);
    cfg.l96.dt = get_num(jm, "dt", 0.01, text);
  } else if (kind == "mlorenz96") {
    cfg.model_kind = ModelKind::MultivariateLorenz96;
    check_keys(jm, "model", {"kind", "n", "base", "amplitude", "omega", "q", "dt"}, text);
    cfg.ml96.n = get_int(jm, "n", 40, text);
    cfg.ml96.base = get_num(jm, "base", 8.0, text);
    cfg.ml96.amplitude = get_num(jm, "amplitude", 4.0, text);
    cfg.ml96.omega = get_num(jm, "omega", cfg.ml96.omega, text);
    cfg.ml96.q = get_int(jm, "q", 4, text);
    cfg.ml96.dt = get_num(jm, "dt", 0.01, text);
  } else if (kind == "qg") {
    cfg.model_kind = ModelKind::QuasiGeostrophic;
    check_keys(jm, "model", {"kind", "grid", "F", "eps", "A", "dt", "truth_spinup"}, text);
    cfg.qg.grid = get_int(jm, "grid", 33, text);
    cfg.qg.F = get_num(jm, "F", 1600.0, text);
    cfg.qg.eps = get_num(jm, "eps", 1e-5, text);
    cfg.qg.A = get_num(jm, "A", 2e-11, text);
    cfg.qg.dt = get_num(jm, "dt", 1.0, text);
    cfg.qg.truth_spinup = get_num(jm, "truth_spinup", 100.0, text);
  } else {
    fail(text, "kind", "model.kind must be lorenz96|mlorenz96|qg, got '" + kind + "'");
  }

  // ensemble
  if (root.contains("ensemble")) {
    const json& je = root["ensemble"];
    check_keys(je, "ensemble", {"size", "init_spread", "init_free_run_windows"}, text);
    cfg.ensemble_size = get_int(je, "size", cfg.ensemble_size, text);
    cfg.init_spread = get_num(je, "init_spread", cfg.init_spread, text);
    cfg.init_free_run_windows = get_int(je, "init_free_run_windows", cfg.init_free_run_windows, text);
  }
  if (cfg.ensemble_size < 2) fail(text, "size", "ensemble.size must be >= 2");

  // observations
  if (!root.contains("observations"))
    throw ConfigError("config error: missing 'observations' section");
  const json& jo = root["observations"];
  check_keys(jo, "observations", {"indices", "sublattice_stride", "variance", "window"}, text);
  if (jo.contains("indices")) {
    if (!jo["indices"].is_array()) fail(text, "indices", "'indices' must be an array");
    for (const auto& v : jo["indices"]) {
      if (!v.is_number_integer()) fail(text, "indices", "'indices' entries must be integers");
      cfg.obs_indices.push_back(v.get<Index>());
    }
  }
  cfg.sublattice_stride = get_int(jo, "sublattice_stride", 0, text);
  if (cfg.obs_indices.empty() && cfg.sublattice_stride == 0)
    fail(text, "observations", "observations need 'indices' or a 'sublattice_stride'");
  if (!cfg.obs_indices.empty() && cfg.sublattice_stride != 0)
    fail(text, "sublattice_stride", "give either 'indices' or 'sublattice_stride', not both");
  if (jo.contains("variance")) cfg.obs_variance = get_num_list(jo, "variance", text);
  for (double v : cfg.obs_variance)
    if (v < 0) fail(text, "variance", "observation variances must be >= 0");
  cfg.window = get_num(jo, "window", cfg.window, text);
  if (!(cfg.window > 0)) fail(text, "window", "observations.window must be positive");

  // filter
  if (root.contains("filter")) {
    const json& jf = root["filter"];
    check_keys(jf, "filter", {"cycles", "spinup", "inflation", "divergence_factor"}, text);
    cfg.cycles = get_int(jf, "cycles", cfg.cycles, text);
    cfg.spinup = get_int(jf, "spinup", cfg.spinup, text);
    cfg.inflation = get_num(jf, "inflation", cfg.inflation, text);
    cfg.divergence_factor = get_num(jf, "divergence_factor", cfg.divergence_factor, text);
  }
  if (cfg.cycles < 1) fail(text, "cycles", "filter.cycles must be >= 1");
  if (cfg.spinup < 0 || cfg.spinup >= cfg.cycles)
    fail(text, "spinup", "filter.spinup must lie in [0, cycles)");
  if (!(cfg.inflation >= 1.0)) fail(text, "inflation", "filter.inflation must be >= 1");

  // localization
  if (!root.contains("localization"))
    throw ConfigError("config error: missing 'localization' section");
  const json& jl = root["localization"];
  check_keys(jl, "localization",
             {"mode", "function", "mean_function", "groups", "radius", "prior_mean",
              "prior_variance", "optimizer", "horizon", "fd_step_scale", "warm_start_cycles",
              "warm_start_radius", "oracle"},
             text);
  const std::string mode = get_str(jl, "mode", "constant", text);
  if (mode == "constant") cfg.mode = LocalizationMode::Constant;
  else if (mode == "adaptive-3d") cfg.mode = LocalizationMode::Adaptive3D;
  else if (mode == "adaptive-4d") cfg.mode = LocalizationMode::Adaptive4D;
  else if (mode == "oracle") cfg.mode = LocalizationMode::Oracle;
  else fail(text, "mode", "localization.mode must be constant|adaptive-3d|adaptive-4d|oracle");

  const std::string fn = get_str(jl, "function", "gauss", text);
  if (fn != "gauss") fail(text, "function", "localization.function supports only 'gauss'");
  try {
    cfg.mean_kind = mean_kind_from_string(get_str(jl, "mean_function", "mean", text));
  } catch (const std::invalid_argument& err) {
    fail(text, "mean_function", err.what());
  }

  if (jl.contains("groups")) {
    const json& jg = jl["groups"];
    check_keys(jg, "localization.groups", {"kind", "q", "count", "assignment"}, text);
    const std::string gk = get_str(jg, "kind", "single", text);
    if (gk == "single") cfg.groups.kind = GroupSpec::Kind::Single;
    else if (gk == "mod") cfg.groups.kind = GroupSpec::Kind::Mod;
    else if (gk == "blocks") cfg.groups.kind = GroupSpec::Kind::Blocks;
    else if (gk == "per-variable") cfg.groups.kind = GroupSpec::Kind::PerVariable;
    else if (gk == "explicit") cfg.groups.kind = GroupSpec::Kind::Explicit;
    else fail(text, "kind", "groups.kind must be single|mod|blocks|per-variable|explicit");
    cfg.groups.q = get_int(jg, "q", cfg.groups.q, text);
    cfg.groups.count = get_int(jg, "count", cfg.groups.count, text);
    if (jg.contains("assignment")) {
      if (!jg["assignment"].is_array()) fail(text, "assignment", "'assignment' must be an array");
      for (const auto& v : jg["assignment"]) cfg.groups.assignment.push_back(v.get<int>());
    }
    if (cfg.groups.kind == GroupSpec::Kind::Explicit && cfg.groups.assignment.empty())
      fail(text, "assignment", "explicit groups require an 'assignment' array");
  }

  cfg.radius = get_num(jl, "radius", cfg.radius, text);
  if (jl.contains("prior_mean")) cfg.prior_mean = get_num_list(jl, "prior_mean", text);
  if (jl.contains("prior_variance")) cfg.prior_variance = get_num_list(jl, "prior_variance", text);

  if (jl.contains("optimizer")) {
    const json& jop = jl["optimizer"];
    check_keys(jop, "localization.optimizer",
               {"max_iters", "grad_tol", "radius_min", "shrink", "armijo_c"}, text);
    cfg.optimizer.max_iters = static_cast<int>(get_int(jop, "max_iters", cfg.optimizer.max_iters, text));
    cfg.optimizer.grad_tol = get_num(jop, "grad_tol", cfg.optimizer.grad_tol, text);
    cfg.optimizer.upsilon_min = get_num(jop, "radius_min", cfg.optimizer.upsilon_min, text);
    cfg.optimizer.shrink = get_num(jop, "shrink", cfg.optimizer.shrink, text);
    cfg.optimizer.armijo_c = get_num(jop, "armijo_c", cfg.optimizer.armijo_c, text);
    if (!(cfg.optimizer.shrink > 0 && cfg.optimizer.shrink < 1))
      fail(text, "shrink", "optimizer.shrink must lie in (0, 1)");
    if (cfg.optimizer.max_iters < 1) fail(text, "max_iters", "optimizer.max_iters must be >= 1");
    if (!(cfg.optimizer.upsilon_min > 0)) fail(text, "radius_min", "optimizer.radius_min must be > 0");
  }

  cfg.horizon = static_cast<int>(get_int(jl, "horizon", cfg.horizon, text));
  if (cfg.horizon < 0) fail(text, "horizon", "localization.horizon must be >= 0");
  cfg.fd_step_scale = get_num(jl, "fd_step_scale", cfg.fd_step_scale, text);
  cfg.warm_start_cycles = get_int(jl, "warm_start_cycles", cfg.warm_start_cycles, text);
  cfg.warm_start_radius = get_num(jl, "warm_start_radius", cfg.warm_start_radius, text);

  if (jl.contains("oracle")) {
    const json& jor = jl["oracle"];
    check_keys(jor, "localization.oracle",
               {"grid_start", "grid_stop", "grid_step", "multivariate", "sweeps"}, text);
    cfg.oracle.grid_start = get_num(jor, "grid_start", cfg.oracle.grid_start, text);
    cfg.oracle.grid_stop = get_num(jor, "grid_stop", cfg.oracle.grid_stop, text);
    cfg.oracle.grid_step = get_num(jor, "grid_step", cfg.oracle.grid_step, text);
    if (jor.contains("multivariate")) {
      if (!jor["multivariate"].is_boolean()) fail(text, "multivariate", "'multivariate' must be a boolean");
      cfg.oracle.multivariate = jor["multivariate"].get<bool>();
    }
    cfg.oracle.sweeps = static_cast<int>(get_int(jor, "sweeps", cfg.oracle.sweeps, text));
  }

  // sweep
  if (root.contains("sweep")) {
    const json& js = root["sweep"];
    check_keys(js, "sweep",
               {"alphas", "radii", "prior_mean_offsets", "prior_variances", "workers"}, text);
    cfg.sweep.alphas = get_num_list(js, "alphas", text);
    cfg.sweep.radii = get_num_list(js, "radii", text);
    cfg.sweep.prior_mean_offsets = get_num_list(js, "prior_mean_offsets", text);
    cfg.sweep.prior_variances = get_num_list(js, "prior_variances", text);
    cfg.workers = static_cast<int>(get_int(js, "workers", cfg.workers, text));
    if (cfg.workers < 1) fail(text, "workers", "sweep.workers must be >= 1");
  }

  // output
  if (root.contains("output")) {
    const json& jout = root["output"];
    check_keys(jout, "output", {"prefix"}, text);
    cfg.output_prefix = get_str(jout, "prefix", cfg.output_prefix, text);
  }

  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::unique_ptr<ModelSystem> make_model(const ExperimentConfig& cfg) {
  switch (cfg.model_kind) {
    case ModelKind::Lorenz96: return std::make_unique<Lorenz96>(cfg.l96);
    case ModelKind::MultivariateLorenz96: return std::make_unique<MultivariateLorenz96>(cfg.ml96);
    case ModelKind::QuasiGeostrophic: return std::make_unique<QuasiGeostrophic>(cfg.qg);
  }
  throw std::logic_error("make_model: unreachable");
}

ObservationOperator make_observation_operator(const ExperimentConfig& cfg,
                                              const ModelSystem& model) {
  if (!cfg.obs_indices.empty())
    return ObservationOperator::from_one_based(cfg.obs_indices, model.dim());

  // Regular sub-lattice over the QG grid: every stride-th interior point on
  // both axes starting at the first interior row/column.
  if (cfg.model_kind != ModelKind::QuasiGeostrophic)
    throw ConfigError("config error: sublattice_stride is only meaningful for the qg model");
  const Index G = cfg.qg.grid;
  const Index s = cfg.sublattice_stride;
  std::vector<Index> idx;
  for (Index r = 0; r < G; r += s)
    for (Index c = 0; c < G; c += s) idx.push_back(r * G + c);
  return ObservationOperator(std::move(idx), model.dim());
}

GroupMapping make_group_mapping(const GroupSpec& spec, Index n) {
  switch (spec.kind) {
    case GroupSpec::Kind::Single: return GroupMapping::single(n);
    case GroupSpec::Kind::Mod: return GroupMapping::modulo(n, spec.q);
    case GroupSpec::Kind::Blocks: return GroupMapping::blocks(n, spec.count);
    case GroupSpec::Kind::PerVariable: return GroupMapping::per_variable(n);
    case GroupSpec::Kind::Explicit: {
      const int g = spec.assignment.empty()
                        ? 0
                        : 1 + *std::max_element(spec.assignment.begin(), spec.assignment.end());
      return GroupMapping(spec.assignment, g);
    }
  }
  throw std::logic_error("make_group_mapping: unreachable");
}

Vector resolve_obs_variances(const ExperimentConfig& cfg, Index obs_dim) {
  if (cfg.obs_variance.size() == 1)
    return Vector::Constant(obs_dim, cfg.obs_variance.front());
  if (static_cast<Index>(cfg.obs_variance.size()) != obs_dim)
    throw ConfigError("config error: observation variance list length != observed count");
  return Eigen::Map<const Vector>(cfg.obs_variance.data(),
                                  static_cast<Index>(cfg.obs_variance.size()));
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  json jm;
  jm["kind"] = to_string(cfg.model_kind);
  switch (cfg.model_kind) {
    case ModelKind::Lorenz96:
      jm["n"] = cfg.l96.n;
      jm["forcing"] = cfg.l96.forcing;
      jm["dt"] = cfg.l96.dt;
      break;
    case ModelKind::MultivariateLorenz96:
      jm["n"] = cfg.ml96.n;
      jm["base"] = cfg.ml96.base;
      jm["amplitude"] = cfg.ml96.amplitude;
      jm["omega"] = cfg.ml96.omega;
      jm["q"] = cfg.ml96.q;
      jm["dt"] = cfg.ml96.dt;
      break;
    case ModelKind::QuasiGeostrophic:
      jm["grid"] = cfg.qg.grid;
      jm["F"] = cfg.qg.F;
      jm["eps"] = cfg.qg.eps;
      jm["A"] = cfg.qg.A;
      jm["dt"] = cfg.qg.dt;
      jm["truth_spinup"] = cfg.qg.truth_spinup;
      break;
  }
  j["model"] = jm;
  j["ensemble"] = {{"size", cfg.ensemble_size},
                   {"init_spread", cfg.init_spread},
                   {"init_free_run_windows", cfg.init_free_run_windows}};
  json jobs;
  if (!cfg.obs_indices.empty()) jobs["indices"] = cfg.obs_indices;
  if (cfg.sublattice_stride > 0) jobs["sublattice_stride"] = cfg.sublattice_stride;
  jobs["variance"] = cfg.obs_variance;
  jobs["window"] = cfg.window;
  j["observations"] = jobs;
  j["filter"] = {{"cycles", cfg.cycles},
                 {"spinup", cfg.spinup},
                 {"inflation", cfg.inflation},
                 {"divergence_factor", cfg.divergence_factor}};
  json jl;
  jl["mode"] = to_string(cfg.mode);
  jl["function"] = "gauss";
  jl["mean_function"] = to_string(cfg.mean_kind);
  json jg;
  switch (cfg.groups.kind) {
    case GroupSpec::Kind::Single: jg["kind"] = "single"; break;
    case GroupSpec::Kind::Mod: jg["kind"] = "mod"; jg["q"] = cfg.groups.q; break;
    case GroupSpec::Kind::Blocks: jg["kind"] = "blocks"; jg["count"] = cfg.groups.count; break;
    case GroupSpec::Kind::PerVariable: jg["kind"] = "per-variable"; break;
    case GroupSpec::Kind::Explicit:
      jg["kind"] = "explicit";
      jg["assignment"] = cfg.groups.assignment;
      break;
  }
  jl["groups"] = jg;
  jl["radius"] = cfg.radius;
  jl["prior_mean"] = cfg.prior_mean;
  jl["prior_variance"] = cfg.prior_variance;
  jl["optimizer"] = {{"max_iters", cfg.optimizer.max_iters},
                     {"grad_tol", cfg.optimizer.grad_tol},
                     {"radius_min", cfg.optimizer.upsilon_min},
                     {"shrink", cfg.optimizer.shrink},
                     {"armijo_c", cfg.optimizer.armijo_c}};
  jl["horizon"] = cfg.horizon;
  jl["fd_step_scale"] = cfg.fd_step_scale;
  jl["warm_start_cycles"] = cfg.warm_start_cycles;
  jl["warm_start_radius"] = cfg.warm_start_radius;
  jl["oracle"] = {{"grid_start", cfg.oracle.grid_start},
                  {"grid_stop", cfg.oracle.grid_stop},
                  {"grid_step", cfg.oracle.grid_step},
                  {"multivariate", cfg.oracle.multivariate},
                  {"sweeps", cfg.oracle.sweeps}};
  j["localization"] = jl;
  json js;
  js["alphas"] = cfg.sweep.alphas;
  js["radii"] = cfg.sweep.radii;
  js["prior_mean_offsets"] = cfg.sweep.prior_mean_offsets;
  js["prior_variances"] = cfg.sweep.prior_variances;
  js["workers"] = cfg.workers;
  j["sweep"] = js;
  j["output"] = {{"prefix", cfg.output_prefix}};
  return j.dump(2);
}

}  // namespace adaloc
