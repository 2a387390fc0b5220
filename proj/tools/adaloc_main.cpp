#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "adaloc/checks.hpp"
#include "adaloc/harness.hpp"

namespace {

// Exit codes: 0 success, 1 divergence-only failures, 2 errors.
constexpr int kOk = 0;
constexpr int kDiverged = 1;
constexpr int kError = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

adaloc::ExperimentConfig load(const CommonOpts& opts) {
  adaloc::ExperimentConfig cfg = adaloc::load_config_file(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.workers) cfg.workers = *opts.workers;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  auto* copt = cmd->add_option("--config", opts.config_path, "Experiment config file (JSON)");
  if (needs_config) copt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--seed", opts.seed, "Override the config RNG seed");
  cmd->add_option("--workers", opts.workers, "Override the sweep worker count");
}

int do_run(const CommonOpts& opts, bool force_oracle) {
  adaloc::ExperimentConfig cfg = load(opts);
  if (force_oracle && cfg.mode != adaloc::LocalizationMode::Oracle) {
    std::cerr << "error: the 'oracle' subcommand requires localization.mode = \"oracle\"\n";
    return kError;
  }
  const adaloc::ExperimentRecord record =
      force_oracle ? adaloc::oracle_run(cfg) : adaloc::run_experiment(cfg);
  adaloc::write_run_outputs(opts.out_dir, cfg.output_prefix, record);

  std::cout << "cycles completed: " << record.cycles.size() << "/" << cfg.cycles << "\n";
  if (std::isfinite(record.aggregate_rmse))
    std::cout << "aggregate RMSE (post spin-up): " << adaloc::format_double(record.aggregate_rmse)
              << "\n";
  if (record.diverged) {
    std::cout << "run diverged at cycle " << record.diverged_at << ": "
              << record.divergence_reason << "\n";
    return kDiverged;
  }
  return kOk;
}

int do_sweep(const CommonOpts& opts) {
  adaloc::ExperimentConfig cfg = load(opts);
  const adaloc::SweepResult result = adaloc::sweep(cfg, opts.out_dir);

  namespace fs = std::filesystem;
  fs::create_directories(opts.out_dir);
  {
    std::ofstream out(fs::path(opts.out_dir) / (cfg.output_prefix + "_sweep.csv"));
    adaloc::write_sweep_csv(out, result.rows);
  }
  {
    std::ofstream out(fs::path(opts.out_dir) / (cfg.output_prefix + "_sweep_best.csv"));
    adaloc::write_sweep_csv(out, result.best_rows);
  }

  size_t diverged = 0;
  for (const auto& row : result.rows) diverged += row.diverged ? 1 : 0;
  std::cout << result.rows.size() << " sweep points, " << diverged << " diverged\n";
  for (const auto& row : result.best_rows)
    std::cout << "best @ alpha " << row.alpha << ": prior_mean " << row.prior_mean
              << " prior_var " << row.prior_var << " rmse "
              << adaloc::format_double(row.aggregate_rmse) << "\n";
  return diverged == 0 ? kOk : kDiverged;
}

int do_check() {
  const auto results = adaloc::run_fast_checks();
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kOk : kError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaloc: DEnKF twin experiments with adaptive Schur-product localization"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, oracle_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one twin experiment");
  add_common(run_cmd, run_opts);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run the config's parameter sweep");
  add_common(sweep_cmd, sweep_opts);
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Run a truth-aware oracle experiment");
  add_common(oracle_cmd, oracle_opts);
  app.add_subcommand("check", "Run the fast invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run_opts, false);
    if (sweep_cmd->parsed()) return do_sweep(sweep_opts);
    if (oracle_cmd->parsed()) return do_run(oracle_opts, true);
    return do_check();
  } catch (const adaloc::ConfigError& err) {
    std::cerr << err.what() << "\n";
    return kError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kError;
  }
}
