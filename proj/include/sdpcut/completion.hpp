#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdpcut/engine.hpp"
#include "sdpcut/model.hpp"

namespace sdpcut {

struct Observation {
  int i = 0;  // i <= j
  int j = 0;
  double value = 0.0;
  bool operator==(const Observation&) const = default;
};

struct CompletionInstance {
  int n = 0;
  std::vector<Observation> observations;
  double gamma = 0.0;

  /// In-range, i <= j, duplicate-free, finite values, gamma > 0.
  void validate() const;
};

/// U, V with N(0, 1) entries, A = (U V' + V U') / 2 (rank <= 2r), and
/// floor(fraction * n(n+1)/2) distinct upper-triangle positions sampled
/// uniformly without replacement. gamma = 1/n. Deterministic in `seed`.
CompletionInstance generate_completion_instance(int n, int rank, double fraction, std::uint64_t seed);

/// min theta + (1/gamma) s  s.t. theta >= ||X||_F, s >= ||X||_F^2 (as a
/// second-order cone), X_ij = A_ij on the observed entries. Cuts
/// theta >= <X, Y> are added by the engine.
ConicProgram completion_program(const CompletionInstance& instance);

/// ||X||_* + (1/gamma) ||X||_F^2.
double completion_objective(const SymMat& x, double gamma);

/// Nuclear-epigraph cuts with the default tolerances.
EngineConfig completion_default_config();

/// Runs the engine with epigraph cuts. Each record's upper bound is the
/// running minimum of the true objective over the iterates; the run stops as
/// converged once (UB - LB) / UB <= gap_tol or the iterate is eps-feasible.
SolveResult complete(const CompletionInstance& instance, const SolverBackend& backend, const EngineConfig& config,
                     double gap_tol = 1e-3);

/// Largest |X_ij - A_ij| over the observations.
double max_observation_error(const CompletionInstance& instance, const SymMat& x);

nlohmann::json to_json(const CompletionInstance& instance);
CompletionInstance completion_from_json(const nlohmann::json& j);

}  // namespace sdpcut
