#pragma once

#include <vector>

#include "sdpcut/model.hpp"

namespace sdpcut {

enum class NuclearMode { membership, epigraph };

struct OracleReport {
  /// Largest violation over the family's Y-set at the query point.
  double violation = 0.0;
  std::vector<LinearCut> cuts;
  bool feasible = true;
};

/// Trailing-eigenvalue cuts -<X, q q'> <= 0, one per eigenvalue below -eps,
/// most negative first, at most max_cuts. violation = max(0, -lambda_min).
OracleReport eig_cut_oracle(const SymMat& x, double eps, int max_cuts);

/// Y* = sum sign(lambda_i) q_i q_i' with sign(0) = +1, so <X, Y*> = ||X||_*.
SymMat nuclear_maximizer(const SymMat& x);

/// membership: violation ||X||_* - tr X, cut <X, Y* - I> <= 0.
/// epigraph:   violation ||X||_* - theta, cut <X, Y*> - theta <= 0.
/// At most one cut, emitted only when the violation exceeds eps.
OracleReport nuclear_cut_oracle(const SymMat& x, double eps, NuclearMode mode, double theta = 0.0);

/// 1 for trailing-eigenvalue cuts, 2 sqrt(n) for nuclear cuts.
double lipschitz_constant(CutFamily family, int n);

}  // namespace sdpcut
