#include "sdpcut/model.hpp"

#include <cmath>
#include <numbers>

#include "sdpcut/errors.hpp"

namespace sdpcut {

void ConeProblem::validate() const {
  const auto n = c.size();
  if (A.cols() != n || G.cols() != n) throw DimensionError("constraint matrices have wrong column count");
  if (A.rows() != b.size()) throw DimensionError("A and b disagree");
  if (G.rows() != h.size()) throw DimensionError("G and h disagree");
  long total = orthant_dim;
  for (int d : soc_dims) {
    if (d < 1) throw DimensionError("second-order cone dimension must be positive");
    total += d;
  }
  if (orthant_dim < 0 || total != h.size()) throw DimensionError("cone dimensions do not cover G");
}

void SDPInstance::validate() const {
  if (order < 1) throw DomainError("SDP order must be positive");
  if (objective.order() != order) throw DimensionError("objective matrix has the wrong order");
  for (const auto& eq : equalities) {
    if (eq.matrix.order() != order) throw DimensionError("constraint matrix has the wrong order");
    if (!std::isfinite(eq.rhs)) throw DomainError("constraint right-hand side is not finite");
  }
  if (trace_bound && !(*trace_bound >= 0.0 && std::isfinite(*trace_bound))) {
    throw DomainError("trace bound must be finite and non-negative");
  }
}

double AffineExpr::evaluate(const std::vector<double>& values) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * values.at(t.var);
  return v;
}

double LinearRow::violation(const std::vector<double>& values) const {
  double lhs = 0.0;
  for (const auto& t : terms) lhs += t.coef * values.at(t.var);
  switch (sense) {
    case RowSense::equal:
      return std::abs(lhs - rhs);
    case RowSense::less_equal:
      return lhs - rhs;
    case RowSense::greater_equal:
      return rhs - lhs;
  }
  return 0.0;
}

double SocBlock::violation(const std::vector<double>& values) const {
  double sq = 0.0;
  for (const auto& e : entries) {
    const double v = e.evaluate(values);
    sq += v * v;
  }
  return std::sqrt(sq) - bound.evaluate(values);
}

int LinearCut::order() const {
  if (const auto* dense = std::get_if<SymMat>(&matrix)) return dense->order();
  const auto& lr = std::get<LowRankMatrix>(matrix);
  return lr.terms.empty() ? 0 : static_cast<int>(lr.terms.front().vec.size());
}

SymMat LinearCut::dense_matrix() const {
  if (const auto* dense = std::get_if<SymMat>(&matrix)) return *dense;
  const auto& lr = std::get<LowRankMatrix>(matrix);
  const int n = order();
  SymMat g(n);
  for (const auto& term : lr.terms) {
    const double w = lr.scale * term.sign;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) g.add(i, j, w * term.vec(i) * term.vec(j));
    }
  }
  return g;
}

double LinearCut::matrix_inner(const SymMat& x) const {
  if (const auto* dense = std::get_if<SymMat>(&matrix)) return dense->inner(x);
  const auto& lr = std::get<LowRankMatrix>(matrix);
  if (!lr.terms.empty() && order() != x.order()) throw DimensionError("cut and matrix orders differ");
  const Eigen::MatrixXd xd = x.dense();
  double s = 0.0;
  for (const auto& term : lr.terms) s += term.sign * term.vec.dot(xd * term.vec);
  return lr.scale * s;
}

ConicProgram::ConicProgram(int n) : order(n), cost(packed_size(n), 0.0) {
  if (n < 1) throw DomainError("program order must be positive");
}

int ConicProgram::add_variable(std::string name, double min_cost) {
  aux_names.push_back(std::move(name));
  cost.push_back(min_cost);
  return num_vars() - 1;
}

std::optional<int> ConicProgram::find_variable(const std::string& name) const {
  for (std::size_t k = 0; k < aux_names.size(); ++k) {
    if (aux_names[k] == name) return num_matrix_vars() + static_cast<int>(k);
  }
  return std::nullopt;
}

std::vector<Term> ConicProgram::matrix_terms(const SymMat& g, double scale) const {
  if (g.order() != order) throw DimensionError("matrix order differs from the program's");
  std::vector<Term> terms;
  for (int j = 0; j < order; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double v = g(i, j);
      if (v != 0.0) terms.push_back({matrix_var(i, j), scale * (i == j ? v : 2.0 * v)});
    }
  }
  return terms;
}

void ConicProgram::set_matrix_objective(const SymMat& c, ObjectiveSense sense) {
  reported_sense = sense;
  const double sign = sense == ObjectiveSense::maximize ? -1.0 : 1.0;
  for (int k = 0; k < num_matrix_vars(); ++k) cost[k] = 0.0;
  for (const auto& t : matrix_terms(c, sign)) cost[t.var] = t.coef;
}

double ConicProgram::reported_objective(const std::vector<double>& values) const {
  double v = cost_constant;
  for (std::size_t k = 0; k < cost.size(); ++k) v += cost[k] * values.at(k);
  return to_reported(v);
}

SymMat ConicProgram::matrix_value(const std::vector<double>& values) const {
  if (values.size() < packed_size(order)) throw DimensionError("value vector too short");
  return SymMat(order, std::vector<double>(values.begin(), values.begin() + num_matrix_vars()));
}

void ConicProgram::validate() const {
  const int nv = num_vars();
  if (static_cast<int>(cost.size()) != nv) throw DimensionError("cost vector length mismatch");
  auto check_terms = [nv](const std::vector<Term>& terms) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= nv) {
        throw DimensionError("term references undeclared variable " + std::to_string(t.var));
      }
    }
  };
  for (const auto& r : rows) check_terms(r.terms);
  for (const auto& c : cones) {
    check_terms(c.bound.terms);
    for (const auto& e : c.entries) check_terms(e.terms);
  }
  if (theta && (*theta < 0 || *theta >= nv)) throw DimensionError("theta index out of range");
  for (const auto& cut : cuts) {
    if (cut.order() != order) throw DimensionError("cut order differs from the program's");
    if (cut.theta_coef != 0.0 && !theta) throw DimensionError("cut uses theta but the program has none");
  }
}

void append_cut(ConicProgram& program, LinearCut cut) {
  if (cut.order() != program.order) {
    throw DimensionError("cut of order " + std::to_string(cut.order()) +
                         " added to program of order " + std::to_string(program.order));
  }
  if (cut.theta_coef != 0.0 && !program.theta) {
    throw DimensionError("cut uses theta but the program declares no epigraph variable");
  }
  if (const auto* lr = std::get_if<LowRankMatrix>(&cut.matrix)) {
    for (const auto& term : lr->terms) {
      if (std::abs(term.vec.norm() - 1.0) > 1e-10) throw DomainError("low-rank cut vector is not unit norm");
    }
  }
  program.cuts.push_back(std::move(cut));
}

ConicProgram add_cut(ConicProgram program, LinearCut cut) {
  append_cut(program, std::move(cut));
  return program;
}

double evaluate_cut(const LinearCut& cut, double theta, const SymMat& x) {
  if (cut.order() != x.order()) throw DimensionError("cut and matrix orders differ");
  return cut.theta_coef * theta + cut.matrix_inner(x) - cut.rhs;
}

LinearRow cut_row(const ConicProgram& program, const LinearCut& cut) {
  LinearRow row;
  row.terms = program.matrix_terms(cut.dense_matrix());
  if (cut.theta_coef != 0.0) row.terms.push_back({*program.theta, cut.theta_coef});
  row.sense = RowSense::less_equal;
  row.rhs = cut.rhs;
  return row;
}

namespace {

// Entries of vec(X) with ||vec(X)||_2 = ||X||_F, scaled by `scale`.
std::vector<AffineExpr> frobenius_entries(const ConicProgram& p, double scale) {
  std::vector<AffineExpr> out;
  out.reserve(packed_size(p.order));
  for (int j = 0; j < p.order; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double w = i == j ? 1.0 : std::numbers::sqrt2;
      out.push_back({{{p.matrix_var(i, j), scale * w}}, 0.0});
    }
  }
  return out;
}

}  // namespace

int add_ridge(ConicProgram& program, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("ridge gamma must be positive");
  const int s = program.add_variable("ridge", 1.0 / gamma);
  SocBlock block;
  block.bound = {{{s, 1.0}}, 1.0};
  block.entries = frobenius_entries(program, 2.0);
  block.entries.push_back({{{s, 1.0}}, -1.0});
  program.cones.push_back(std::move(block));
  return s;
}

void add_frobenius_epigraph(ConicProgram& program, int theta_var) {
  SocBlock block;
  block.bound = {{{theta_var, 1.0}}, 0.0};
  block.entries = frobenius_entries(program, 1.0);
  program.cones.push_back(std::move(block));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::numerical_trouble:
      return "numerical_trouble";
  }
  return "unknown";
}

LoweredProgram lower(const ConicProgram& program) {
  program.validate();
  const int nv = program.num_vars();
  std::vector<Eigen::Triplet<double>> a_trip, g_trip;
  std::vector<double> b, h;

  auto push_row = [](std::vector<Eigen::Triplet<double>>& trip, std::vector<double>& rhs,
                     const std::vector<Term>& terms, double sign, double r) {
    const int row = static_cast<int>(rhs.size());
    for (const auto& t : terms) trip.emplace_back(row, t.var, sign * t.coef);
    rhs.push_back(sign * r);
  };

  for (const auto& r : program.rows) {
    switch (r.sense) {
      case RowSense::equal:
        push_row(a_trip, b, r.terms, 1.0, r.rhs);
        break;
      case RowSense::less_equal:
        push_row(g_trip, h, r.terms, 1.0, r.rhs);
        break;
      case RowSense::greater_equal:
        push_row(g_trip, h, r.terms, -1.0, -r.rhs);
        break;
    }
  }
  for (const auto& cut : program.cuts) {
    const LinearRow row = cut_row(program, cut);
    push_row(g_trip, h, row.terms, 1.0, row.rhs);
  }
  const int orthant = static_cast<int>(h.size());

  // s = h - G x must equal each affine entry f x + g, so G = -f and h = g.
  std::vector<int> soc_dims;
  soc_dims.reserve(program.cones.size());
  for (const auto& cone : program.cones) {
    push_row(g_trip, h, cone.bound.terms, -1.0, -cone.bound.constant);
    for (const auto& e : cone.entries) push_row(g_trip, h, e.terms, -1.0, -e.constant);
    soc_dims.push_back(1 + static_cast<int>(cone.entries.size()));
  }

  LoweredProgram out;
  ConeProblem& p = out.problem;
  p.c = Eigen::Map<const Eigen::VectorXd>(program.cost.data(), nv);
  p.A.resize(static_cast<long>(b.size()), nv);
  p.A.setFromTriplets(a_trip.begin(), a_trip.end());
  p.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<long>(b.size()));
  p.G.resize(static_cast<long>(h.size()), nv);
  p.G.setFromTriplets(g_trip.begin(), g_trip.end());
  p.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<long>(h.size()));
  p.orthant_dim = orthant;
  p.soc_dims = std::move(soc_dims);
  out.cost_constant = program.cost_constant;
  return out;
}

BackendSolution solve_master(const SolverBackend& backend, const ConicProgram& program) {
  const LoweredProgram lowered = lower(program);
  const ConeSolution cs = backend.solve(lowered.problem);

  BackendSolution out;
  out.iterations = cs.iterations;
  out.backend_status = cs.message;
  switch (cs.status) {
    case ConeStatus::optimal:
      out.status = SolveStatus::optimal;
      break;
    case ConeStatus::infeasible:
      out.status = SolveStatus::infeasible;
      break;
    case ConeStatus::unbounded:
      out.status = SolveStatus::unbounded;
      break;
    case ConeStatus::numerical_trouble:
      out.status = SolveStatus::numerical_trouble;
      break;
  }
  if (out.status != SolveStatus::optimal || cs.x.size() != program.num_vars()) {
    if (out.status == SolveStatus::optimal) out.status = SolveStatus::numerical_trouble;
    out.matrix = SymMat(program.order);
    return out;
  }
  out.values.assign(cs.x.data(), cs.x.data() + cs.x.size());
  for (double& v : out.values) {
    if (!std::isfinite(v)) {
      out.status = SolveStatus::numerical_trouble;
      out.backend_status += " (non-finite primal values)";
      out.matrix = SymMat(program.order);
      out.values.clear();
      return out;
    }
  }
  out.matrix = program.matrix_value(out.values);
  if (program.theta) out.theta = out.values[*program.theta];
  out.objective = program.reported_objective(out.values);
  return out;
}

}  // namespace sdpcut
