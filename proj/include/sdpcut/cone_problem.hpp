#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace sdpcut {

/// Standard-form conic program handed to a solver backend:
///
///   minimize    c'x
///   subject to  A x = b
///               h - G x in K
///
/// where K is the nonnegative orthant of dimension `orthant_dim` followed by
/// second-order cones {(t, u) : ||u||_2 <= t} of the listed dimensions. The
/// variables x are free.
struct ConeProblem {
  Eigen::VectorXd c;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> G;
  Eigen::VectorXd h;
  int orthant_dim = 0;
  std::vector<int> soc_dims;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_equalities() const { return static_cast<int>(b.size()); }
  int num_cone_rows() const { return static_cast<int>(h.size()); }
  /// Throws DimensionError when the blocks are inconsistent.
  void validate() const;
};

enum class ConeStatus { optimal, infeasible, unbounded, numerical_trouble };

struct ConeSolution {
  ConeStatus status = ConeStatus::numerical_trouble;
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  /// Backend-specific exit description, e.g. "optimal" or "close to optimal".
  std::string message;
};

}  // namespace sdpcut
