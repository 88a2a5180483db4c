#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sdpcut/model.hpp"

namespace sdpcut {

struct BenchRow {
  std::string instance;
  int n = 0;
  std::string param_name;  // "k" or "rank"
  int param = 0;
  std::string method;
  double bound = 0.0;
  /// Best feasible value (SPCA) or best upper bound (completion).
  double baseline = 0.0;
  /// 100 |bound - baseline| / |baseline|.
  double gap_percent = 0.0;
  int cuts = 0;
  double seconds = 0.0;
  /// argv tail that reproduces this row with a single-instance subcommand.
  std::string reproduce;
};

double bench_gap_percent(double bound, double baseline);

struct BenchReport {
  std::string suite;
  std::vector<BenchRow> rows;

  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;
  void write_table(std::ostream& out) const;
};

struct BenchOptions {
  std::string pitprops_path;  // empty: bundled data file
  std::vector<int> completion_sizes{50, 100};
  int completion_rank = 5;
  double completion_fraction = 0.5;
  unsigned long long seed = 42;
};

/// Pitprops k = 10: SOC bound with 0, 5 and 20 eig cuts, the bound after
/// cutting to eps-feasibility, and the aggregated SOC bound.
BenchReport bench_spca_pitprops(const SolverBackend& backend, const BenchOptions& options = {});

/// Generated completion instances at each size: final lower bound vs
/// incumbent upper bound, with wall-clock time.
BenchReport bench_completion_scaling(const SolverBackend& backend, const BenchOptions& options = {});

BenchReport run_bench_suite(const std::string& suite, const SolverBackend& backend,
                            const BenchOptions& options = {});

std::string bundled_pitprops_path();

}  // namespace sdpcut
