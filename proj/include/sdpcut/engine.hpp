#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdpcut/model.hpp"
#include "sdpcut/oracle.hpp"

namespace sdpcut {

enum class CutMode { eig, nuclear_membership, nuclear_epigraph };
enum class ViolationScaling { absolute, trace_relative };
enum class CutRetention { keep_all, drop_inactive };
enum class EngineStatus { converged, iteration_limit, backend_failure };

const char* to_string(EngineStatus s);
const char* to_string(CutMode m);
CutFamily family_of(CutMode m);

struct EngineConfig {
  double eps = 1e-6;
  int max_iterations = 2000;
  CutMode cuts = CutMode::eig;
  int max_cuts_per_iter = 10;
  /// Adds (1/gamma) ||X||_F^2 to the minimization objective when set.
  std::optional<double> ridge_gamma;
  /// trace_relative stops at violation <= eps * max(1, |tr X|); in epigraph
  /// mode the scale is max(1, theta) instead.
  ViolationScaling scaling = ViolationScaling::trace_relative;
  CutRetention retention = CutRetention::keep_all;
  /// drop_inactive removes cuts older than this many iterations that are slack.
  int drop_age = 20;
  bool keep_iterates = false;
  int stall_window = 50;
  double stall_tol = 1e-12;

  /// Throws DomainError on bad values, including eps <= 10 * backend tolerance.
  void validate(double backend_tolerance) const;
};

struct IterationRecord {
  int t = 0;
  /// Master objective in the reported sense, with `cuts_total` cuts present.
  double bound = 0.0;
  double violation = 0.0;
  int cuts_total = 0;
  std::optional<double> upper_bound;
  double seconds = 0.0;
};

struct SolveResult {
  EngineStatus status = EngineStatus::backend_failure;
  /// "epsilon_feasible", "gap_closed", "cut_budget", "iteration_limit",
  /// "stalled" or a backend failure description.
  std::string termination;
  bool stalled = false;
  SymMat x;
  std::optional<double> theta;
  std::vector<double> values;
  double final_bound = 0.0;
  double final_violation = 0.0;
  std::vector<IterationRecord> trace;
  /// log of the worst-case iteration count n^2 log(L T / eps + 1).
  double log_iteration_bound = 0.0;
  double lipschitz = 1.0;
  std::vector<SymMat> iterates;
  std::vector<double> iterate_thetas;
  ConicProgram final_program;
};

/// Separation oracle as seen by the engine: (X, eps, theta) -> report.
using CutOracle = std::function<OracleReport(const SymMat&, double, std::optional<double>)>;

struct StopDecision {
  EngineStatus status = EngineStatus::converged;
  std::string reason;
};

/// Application hooks: an incumbent upper bound per master solution and an
/// optional early stop checked after each record is written.
struct EngineHooks {
  std::function<std::optional<double>(const BackendSolution&)> upper_bound;
  std::function<std::optional<StopDecision>(const IterationRecord&)> stop;
};

/// Oracle matching the configured cut mode.
CutOracle make_oracle(const EngineConfig& config);

SolveResult solve(ConicProgram program, const CutOracle& oracle, const SolverBackend& backend,
                  const EngineConfig& config, const EngineHooks& hooks = {});
SolveResult solve(ConicProgram program, const SolverBackend& backend, const EngineConfig& config,
                  const EngineHooks& hooks = {});

/// n^2 log(L T / eps + 1).
double theoretical_iteration_bound(double lipschitz, double trace_bound, double eps, int n);

/// True iff all pairs among the non-terminal iterates (every iterate but the
/// last) are more than eps/L - 1e-9 apart in Frobenius norm. When `thetas` is
/// non-empty the epigraph coordinate joins the distance.
bool ball_separation_check(const std::vector<SymMat>& iterates, double eps, double lipschitz,
                           const std::vector<double>& thetas = {});

/// CSV with columns iteration,bound,violation,cuts_total,upper_bound,seconds.
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);
void write_trace_csv_file(const std::string& path, const std::vector<IterationRecord>& trace);

}  // namespace sdpcut
