#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sdpcut/cone_problem.hpp"
#include "sdpcut/symla.hpp"

namespace sdpcut {

enum class ObjectiveSense { minimize, maximize };
enum class TraceMode { equality, inequality };

struct EqualityConstraint {
  SymMat matrix;
  double rhs = 0.0;
};

/// min/max <C, X>  s.t.  <A_i, X> = b_i,  X PSD,  tr(X) (= or <=) T.
struct SDPInstance {
  int order = 0;
  SymMat objective;
  std::vector<EqualityConstraint> equalities;
  /// Absent means no trace row is known yet; relaxation builders refuse such
  /// instances because the outer approximation would be unbounded.
  std::optional<double> trace_bound;
  TraceMode trace_mode = TraceMode::equality;
  ObjectiveSense sense = ObjectiveSense::minimize;

  void validate() const;
};

struct Term {
  int var = 0;
  double coef = 0.0;
  bool operator==(const Term&) const = default;
};

struct AffineExpr {
  std::vector<Term> terms;
  double constant = 0.0;

  double evaluate(const std::vector<double>& values) const;
  bool operator==(const AffineExpr&) const = default;
};

enum class RowSense { equal, less_equal, greater_equal };

struct LinearRow {
  std::vector<Term> terms;
  RowSense sense = RowSense::equal;
  double rhs = 0.0;

  /// Signed violation: positive when the row is violated at `values`.
  double violation(const std::vector<double>& values) const;
  bool operator==(const LinearRow&) const = default;
};

/// ||entries||_2 <= bound, every component affine in the program variables.
struct SocBlock {
  AffineExpr bound;
  std::vector<AffineExpr> entries;

  /// ||entries|| - bound at `values`; positive means violated.
  double violation(const std::vector<double>& values) const;
  bool operator==(const SocBlock&) const = default;
};

enum class CutFamily { eig, nuclear };

struct SignedVector {
  double sign = 1.0;  // +1 or -1
  Eigen::VectorXd vec;  // unit norm
};

/// G = scale * sum_i sign_i q_i q_i^T with unit q_i.
struct LowRankMatrix {
  double scale = 1.0;
  std::vector<SignedVector> terms;
};

/// theta_coef * theta + <G, X> <= rhs.
struct LinearCut {
  double theta_coef = 0.0;
  std::variant<SymMat, LowRankMatrix> matrix;
  double rhs = 0.0;
  CutFamily family = CutFamily::eig;
  int birth = 0;

  int order() const;
  bool is_low_rank() const { return std::holds_alternative<LowRankMatrix>(matrix); }
  SymMat dense_matrix() const;
  double matrix_inner(const SymMat& x) const;
};

/// Master problem over a symmetric matrix variable X (stored as its packed
/// upper triangle, variables 0 .. packed_size(order) - 1) plus named scalar
/// auxiliaries. The objective is always kept in minimization form; a
/// maximization instance is stored negated and `reported_sense` restores the
/// sign at the boundary.
struct ConicProgram {
  int order = 0;
  std::vector<std::string> aux_names;
  std::vector<double> cost;
  double cost_constant = 0.0;
  ObjectiveSense reported_sense = ObjectiveSense::minimize;
  std::vector<LinearRow> rows;
  std::vector<SocBlock> cones;
  std::vector<LinearCut> cuts;
  /// Epigraph variable referenced by cuts with a nonzero theta coefficient.
  std::optional<int> theta;
  std::optional<double> trace_bound;

  ConicProgram() = default;
  explicit ConicProgram(int n);

  int num_matrix_vars() const { return static_cast<int>(packed_size(order)); }
  int num_vars() const { return num_matrix_vars() + static_cast<int>(aux_names.size()); }
  int matrix_var(int i, int j) const { return static_cast<int>(packed_index(i, j)); }
  int add_variable(std::string name, double min_cost = 0.0);
  std::optional<int> find_variable(const std::string& name) const;
  /// Explicit rows plus accumulated cuts.
  std::size_t num_linear_rows() const { return rows.size() + cuts.size(); }

  /// Terms of scale * <G, X> over the packed matrix variables.
  std::vector<Term> matrix_terms(const SymMat& g, double scale = 1.0) const;
  /// Sets the X-part of the cost from <C, X> in the given sense.
  void set_matrix_objective(const SymMat& c, ObjectiveSense sense);

  /// Objective value at `values` in the reported sense.
  double reported_objective(const std::vector<double>& values) const;
  double to_reported(double min_value) const {
    return reported_sense == ObjectiveSense::maximize ? -min_value : min_value;
  }

  SymMat matrix_value(const std::vector<double>& values) const;
  /// Throws DimensionError when a row, cone or cut references an undeclared
  /// variable or a cut's order differs from the program's.
  void validate() const;

  bool has_trace_row() const { return trace_bound.has_value(); }
};

/// Returns `program` with one more linear row (the cut); prior rows unchanged.
ConicProgram add_cut(ConicProgram program, LinearCut cut);
/// In-place variant used by the engine.
void append_cut(ConicProgram& program, LinearCut cut);

/// theta_coef * theta + <G, X> - rhs; positive means violated.
double evaluate_cut(const LinearCut& cut, double theta, const SymMat& x);

/// Lowers a cut to a plain linear row over the program's variables.
LinearRow cut_row(const ConicProgram& program, const LinearCut& cut);

/// Adds s >= ||X||_F^2 through ||(2 vec(X), s - 1)|| <= s + 1 and charges
/// (1/gamma) s in the minimization objective. Returns the index of s.
int add_ridge(ConicProgram& program, double gamma);

/// Adds theta >= ||X||_F as a second-order cone.
void add_frobenius_epigraph(ConicProgram& program, int theta_var);

enum class SolveStatus { optimal, infeasible, unbounded, numerical_trouble };

const char* to_string(SolveStatus s);

struct BackendSolution {
  SolveStatus status = SolveStatus::numerical_trouble;
  SymMat matrix;
  std::vector<double> values;
  std::optional<double> theta;
  /// Objective in the program's reported sense.
  double objective = 0.0;
  int iterations = 0;
  std::string backend_status;
};

/// Anything that minimizes a linear objective over linear rows and
/// second-order cones. It never needs a PSD cone.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual ConeSolution solve(const ConeProblem& problem) const = 0;
  virtual double feasibility_tolerance() const = 0;
  virtual std::string name() const = 0;
};

/// Lowering shared by solve_master and the tests.
struct LoweredProgram {
  ConeProblem problem;
  double cost_constant = 0.0;
};
LoweredProgram lower(const ConicProgram& program);

BackendSolution solve_master(const SolverBackend& backend, const ConicProgram& program);

}  // namespace sdpcut
