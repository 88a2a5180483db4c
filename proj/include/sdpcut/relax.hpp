#pragma once

#include "sdpcut/model.hpp"

namespace sdpcut {

struct SpcaInstance;

enum class RelaxationKind { lp_minor, soc_minor, soc_aggregated };

const char* to_string(RelaxationKind kind);

/// Objective, equality rows, trace row and X_ii >= 0 with the linear 2x2-minor
/// rows X_ii + X_jj +- 2 X_ij >= 0 for i < j. Throws DomainError when the
/// instance has no positive trace bound.
ConicProgram build_lp_minor_relaxation(const SDPInstance& instance);

/// Same base with ||(2 X_ij, X_ii - X_jj)|| <= X_ii + X_jj for i < j.
ConicProgram build_soc_minor_relaxation(const SDPInstance& instance);

/// max <Sigma, X> s.t. tr X = 1, z <= 1, sum z <= k and
/// ||(2 X_i., z_i - X_ii)|| <= z_i + X_ii, i.e. sum_j X_ij^2 <= z_i X_ii.
/// Throws DomainError unless the instance uses the trace equality.
ConicProgram build_aggregated_soc_relaxation(const SpcaInstance& spca);

/// Dispatch for generic instances; soc_aggregated is SPCA-only and rejected.
ConicProgram build_relaxation(const SDPInstance& instance, RelaxationKind kind);

/// 2nT for lp_minor, 2T for the SOC regions.
double diameter_bound(RelaxationKind kind, int n, double trace_bound);

}  // namespace sdpcut
