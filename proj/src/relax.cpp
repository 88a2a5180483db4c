#include "sdpcut/relax.hpp"

#include <cmath>

#include "sdpcut/errors.hpp"
#include "sdpcut/spca.hpp"

namespace sdpcut {

const char* to_string(RelaxationKind kind) {
  switch (kind) {
    case RelaxationKind::lp_minor:
      return "lp_minor";
    case RelaxationKind::soc_minor:
      return "soc_minor";
    case RelaxationKind::soc_aggregated:
      return "soc_aggregated";
  }
  return "unknown";
}

namespace {

LinearRow trace_row(const ConicProgram& p, double rhs, TraceMode mode) {
  LinearRow row;
  for (int i = 0; i < p.order; ++i) row.terms.push_back({p.matrix_var(i, i), 1.0});
  row.sense = mode == TraceMode::equality ? RowSense::equal : RowSense::less_equal;
  row.rhs = rhs;
  return row;
}

ConicProgram base_program(const SDPInstance& inst) {
  inst.validate();
  if (!inst.trace_bound || !(*inst.trace_bound > 0.0)) {
    throw DomainError("building a relaxation needs a positive trace bound");
  }
  ConicProgram p(inst.order);
  p.set_matrix_objective(inst.objective, inst.sense);
  for (const auto& eq : inst.equalities) {
    p.rows.push_back({p.matrix_terms(eq.matrix), RowSense::equal, eq.rhs});
  }
  p.rows.push_back(trace_row(p, *inst.trace_bound, inst.trace_mode));
  p.trace_bound = inst.trace_bound;
  for (int i = 0; i < inst.order; ++i) {
    p.rows.push_back({{{p.matrix_var(i, i), 1.0}}, RowSense::greater_equal, 0.0});
  }
  return p;
}

}  // namespace

ConicProgram build_lp_minor_relaxation(const SDPInstance& instance) {
  ConicProgram p = base_program(instance);
  for (int j = 0; j < p.order; ++j) {
    for (int i = 0; i < j; ++i) {
      for (double sign : {1.0, -1.0}) {
        p.rows.push_back({{{p.matrix_var(i, i), 1.0}, {p.matrix_var(j, j), 1.0}, {p.matrix_var(i, j), 2.0 * sign}},
                          RowSense::greater_equal,
                          0.0});
      }
    }
  }
  return p;
}

ConicProgram build_soc_minor_relaxation(const SDPInstance& instance) {
  ConicProgram p = base_program(instance);
  for (int j = 0; j < p.order; ++j) {
    for (int i = 0; i < j; ++i) {
      SocBlock b;
      b.bound = {{{p.matrix_var(i, i), 1.0}, {p.matrix_var(j, j), 1.0}}, 0.0};
      b.entries.push_back({{{p.matrix_var(i, j), 2.0}}, 0.0});
      b.entries.push_back({{{p.matrix_var(i, i), 1.0}, {p.matrix_var(j, j), -1.0}}, 0.0});
      p.cones.push_back(std::move(b));
    }
  }
  return p;
}

ConicProgram build_aggregated_soc_relaxation(const SpcaInstance& spca) {
  spca.validate();
  if (spca.trace_mode != TraceMode::equality) {
    throw DomainError("the aggregated relaxation requires tr X = 1");
  }
  const int n = spca.sigma.order();
  ConicProgram p(n);
  p.set_matrix_objective(spca.sigma, ObjectiveSense::maximize);
  p.rows.push_back(trace_row(p, 1.0, TraceMode::equality));
  p.trace_bound = 1.0;
  std::vector<int> z(n);
  for (int i = 0; i < n; ++i) z[i] = p.add_variable("z" + std::to_string(i));
  LinearRow budget;
  budget.sense = RowSense::less_equal;
  budget.rhs = spca.k;
  for (int i = 0; i < n; ++i) {
    p.rows.push_back({{{z[i], 1.0}}, RowSense::less_equal, 1.0});
    budget.terms.push_back({z[i], 1.0});
  }
  p.rows.push_back(std::move(budget));
  for (int i = 0; i < n; ++i) {
    SocBlock b;
    b.bound = {{{z[i], 1.0}, {p.matrix_var(i, i), 1.0}}, 0.0};
    for (int j = 0; j < n; ++j) b.entries.push_back({{{p.matrix_var(i, j), 2.0}}, 0.0});
    b.entries.push_back({{{z[i], 1.0}, {p.matrix_var(i, i), -1.0}}, 0.0});
    p.cones.push_back(std::move(b));
  }
  return p;
}

ConicProgram build_relaxation(const SDPInstance& instance, RelaxationKind kind) {
  switch (kind) {
    case RelaxationKind::lp_minor:
      return build_lp_minor_relaxation(instance);
    case RelaxationKind::soc_minor:
      return build_soc_minor_relaxation(instance);
    case RelaxationKind::soc_aggregated:
      break;
  }
  throw UnsupportedError("the aggregated relaxation is only defined for sparse PCA instances");
}

double diameter_bound(RelaxationKind kind, int n, double trace_bound) {
  if (n < 1) throw DomainError("order must be positive");
  if (!(trace_bound >= 0.0)) throw DomainError("trace bound must be non-negative");
  return kind == RelaxationKind::lp_minor ? 2.0 * n * trace_bound : 2.0 * trace_bound;
}

}  // namespace sdpcut
