#include "adaloc/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace adaloc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_run_csv(std::ostream& out, const ExperimentRecord& record) {
  const Index g = record.cycles.empty() ? 1 : record.cycles.front().radii.size();
  out << "cycle,time,rmse_analysis,rmse_forecast";
  for (Index j = 1; j <= g; ++j) out << ",radius_" << j;
  out << ",cost,iters\n";
  for (const CycleRecord& c : record.cycles) {
    out << c.cycle << ',' << format_double(c.time) << ',' << format_double(c.rmse_analysis)
        << ',' << format_double(c.rmse_forecast);
    for (Index j = 0; j < c.radii.size(); ++j) out << ',' << format_double(c.radii[j]);
    out << ',' << format_double(c.cost) << ',' << c.iters << '\n';
  }
}

std::vector<CycleRecord> read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_run_csv: empty file");
  // Count radius columns from the header.
  Index g = 0;
  {
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ','))
      if (col.rfind("radius_", 0) == 0) ++g;
  }
  if (g == 0) throw std::runtime_error("read_run_csv: no radius columns in header");

  std::vector<CycleRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<size_t>(6 + g))
      throw std::runtime_error("read_run_csv: bad column count in row '" + line + "'");
    CycleRecord c;
    c.cycle = std::stol(cells[0]);
    c.time = std::stod(cells[1]);
    c.rmse_analysis = std::stod(cells[2]);
    c.rmse_forecast = std::stod(cells[3]);
    c.radii.resize(g);
    for (Index j = 0; j < g; ++j) c.radii[j] = std::stod(cells[static_cast<size_t>(4 + j)]);
    c.cost = std::stod(cells[static_cast<size_t>(4 + g)]);
    c.iters = std::stoi(cells[static_cast<size_t>(5 + g)]);
    rows.push_back(std::move(c));
  }
  return rows;
}

void write_oracle_table_csv(std::ostream& out, const ExperimentRecord& record) {
  out << "cycle,radius,rmse\n";
  for (const auto& [cycle, radius, rmse] : record.oracle_table)
    out << cycle << ',' << format_double(radius) << ',' << format_double(rmse) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "alpha,prior_mean,prior_var,aggregate_rmse,diverged\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.alpha) << ',' << format_double(r.prior_mean) << ','
        << format_double(r.prior_var) << ',' << format_double(r.aggregate_rmse) << ','
        << (r.diverged ? 1 : 0) << '\n';
  }
}

std::vector<SweepRow> best_per_alpha(const std::vector<SweepRow>& rows) {
  std::map<double, SweepRow> best;
  for (const SweepRow& r : rows) {
    if (r.diverged || !std::isfinite(r.aggregate_rmse)) continue;
    auto it = best.find(r.alpha);
    if (it == best.end() || r.aggregate_rmse < it->second.aggregate_rmse) best[r.alpha] = r;
  }
  std::vector<SweepRow> out;
  out.reserve(best.size());
  for (auto& [alpha, row] : best) out.push_back(row);
  return out;
}

}  // namespace adaloc
