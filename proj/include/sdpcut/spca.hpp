#pragma once

#include <string>
#include <vector>

#include "sdpcut/engine.hpp"
#include "sdpcut/model.hpp"

namespace sdpcut {

struct SpcaInstance {
  SymMat sigma;
  int k = 1;
  TraceMode trace_mode = TraceMode::equality;

  /// Rejects k outside [1, n] and matrices with lambda_min < -1e-8 ||Sigma||_F.
  void validate() const;
};

enum class SpcaMode { full, aggregated };

/// max <Sigma, X> over tr X = 1, ||X||_1 <= k and the SOC minor cones (full),
/// or the aggregated relaxation. ||X||_1 is the entrywise norm of the full
/// matrix, modelled with one absolute-value variable per upper-triangle entry.
ConicProgram spca_relaxation(const SpcaInstance& instance, SpcaMode mode);

struct SpcaLowerBound {
  double value = 0.0;
  std::vector<int> support;
  std::string method;  // "exact" or "greedy_swap"
};

/// Top-k coordinates of the leading eigenvector, then best single swaps
/// until no swap improves the k x k principal lambda_max.
SpcaLowerBound spca_greedy_lower_bound(const SymMat& sigma, int k);

/// max over k-subsets of lambda_max of the principal submatrix. Throws
/// DomainError when C(n, k) > 2e6.
SpcaLowerBound spca_exact_small(const SymMat& sigma, int k);

double binomial(int n, int k);

struct SpcaCheckpoint {
  int cuts = 0;
  double upper_bound = 0.0;
  double gap_percent = 0.0;
  double seconds = 0.0;
};

struct SpcaBoundResult {
  std::vector<SpcaCheckpoint> checkpoints;
  SpcaLowerBound lower_bound;
  SpcaMode mode = SpcaMode::full;
  EngineStatus engine_status = EngineStatus::converged;
  std::string termination;
  std::vector<IterationRecord> trace;
  std::vector<SymMat> iterates;
  double lipschitz = 1.0;
  double seconds = 0.0;
};

/// Default engine settings for bound certificates: eig cuts added one per
/// master solve so that checkpoint c is the bound with exactly c cuts.
EngineConfig spca_default_config();

/// Runs the engine until the last checkpoint's cut count is reached (or the
/// iterate is eps-feasible) and reports the bound at each checkpoint.
SpcaBoundResult spca_upper_bound(const SpcaInstance& instance, const SolverBackend& backend,
                                 const EngineConfig& config, const std::vector<int>& checkpoints,
                                 SpcaMode mode = SpcaMode::full);

}  // namespace sdpcut
