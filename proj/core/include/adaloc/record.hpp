#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adaloc/types.hpp"

namespace adaloc {

struct CycleRecord {
  Index cycle = 0;  // 1-based cycle index
  double time = 0.0;
  double rmse_analysis = 0.0;
  double rmse_forecast = 0.0;
  Vector radii;       // length g
  double cost = 0.0;  // MAP cost at the optimum (adaptive) / RMSE (oracle) / nan (constant)
  int iters = 0;
};

/// Everything a run produces. The truth/analysis traces stay in memory so
/// the aggregate RMSE is recomputable; the CSV carries the per-cycle rows.
struct ExperimentRecord {
  std::vector<CycleRecord> cycles;
  double aggregate_rmse = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  Index diverged_at = -1;
  std::string divergence_reason;

  std::vector<Vector> truth_trace;     // truth at cycle k (index k-1)
  std::vector<Vector> analysis_trace;  // analysis mean at cycle k
  std::vector<double> initial_costs;   // adaptive: cost at the prior mean, per cycle

  std::uint64_t seed = 0;
  std::string manifest_json;

  // Oracle runs only: (cycle, candidate radius, analysis RMSE) rows.
  std::vector<std::tuple<Index, double, double>> oracle_table;
};

/// cycle,time,rmse_analysis,rmse_forecast,radius_1..radius_g,cost,iters
void write_run_csv(std::ostream& out, const ExperimentRecord& record);
std::vector<CycleRecord> read_run_csv(std::istream& in);

void write_oracle_table_csv(std::ostream& out, const ExperimentRecord& record);

struct SweepRow {
  Index index = 0;
  double alpha = 1.0;
  double prior_mean = 0.0;  // constant runs report the radius here
  double prior_var = 0.0;   // zero for constant runs
  double aggregate_rmse = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  std::uint64_t seed = 0;
};

/// alpha,prior_mean,prior_var,aggregate_rmse,diverged
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Best (minimal finite RMSE) row per alpha, in alpha order.
std::vector<SweepRow> best_per_alpha(const std::vector<SweepRow>& rows);

/// Shortest round-trip-exact decimal form of a double.
std::string format_double(double v);

}  // namespace adaloc
