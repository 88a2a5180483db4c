#include "sdpcut/engine.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "sdpcut/errors.hpp"

namespace sdpcut {

const char* to_string(EngineStatus s) {
  switch (s) {
    case EngineStatus::converged:
      return "converged";
    case EngineStatus::iteration_limit:
      return "iteration_limit";
    case EngineStatus::backend_failure:
      return "backend_failure";
  }
  return "unknown";
}

const char* to_string(CutMode m) {
  switch (m) {
    case CutMode::eig:
      return "eig";
    case CutMode::nuclear_membership:
      return "nuclear";
    case CutMode::nuclear_epigraph:
      return "nuclear_epigraph";
  }
  return "unknown";
}

CutFamily family_of(CutMode m) { return m == CutMode::eig ? CutFamily::eig : CutFamily::nuclear; }

void EngineConfig::validate(double backend_tolerance) const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
  if (!(eps > 10.0 * backend_tolerance)) {
    throw DomainError("eps must exceed ten times the backend tolerance");
  }
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (max_cuts_per_iter < 1) throw DomainError("max_cuts_per_iter must be at least 1");
  if (ridge_gamma && !(*ridge_gamma > 0.0)) throw DomainError("ridge gamma must be positive");
  if (drop_age < 1) throw DomainError("drop_age must be at least 1");
  if (stall_window < 1) throw DomainError("stall_window must be at least 1");
}

CutOracle make_oracle(const EngineConfig& config) {
  const CutMode mode = config.cuts;
  const int max_cuts = config.max_cuts_per_iter;
  return [mode, max_cuts](const SymMat& x, double eps, std::optional<double> theta) {
    switch (mode) {
      case CutMode::eig:
        return eig_cut_oracle(x, eps, max_cuts);
      case CutMode::nuclear_membership:
        return nuclear_cut_oracle(x, eps, NuclearMode::membership);
      case CutMode::nuclear_epigraph:
        break;
    }
    if (!theta) throw DimensionError("epigraph cuts need a theta value");
    return nuclear_cut_oracle(x, eps, NuclearMode::epigraph, *theta);
  };
}

double theoretical_iteration_bound(double lipschitz, double trace_bound, double eps, int n) {
  if (!(lipschitz > 0.0) || !(trace_bound > 0.0) || !(eps > 0.0) || n < 1) {
    throw DomainError("iteration bound needs positive inputs");
  }
  return static_cast<double>(n) * n * std::log(lipschitz * trace_bound / eps + 1.0);
}

bool ball_separation_check(const std::vector<SymMat>& iterates, double eps, double lipschitz,
                           const std::vector<double>& thetas) {
  if (!thetas.empty() && thetas.size() != iterates.size()) {
    throw DimensionError("theta list does not match the iterate list");
  }
  const double radius = eps / lipschitz - 1e-9;
  const std::size_t m = iterates.empty() ? 0 : iterates.size() - 1;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      double d2 = (iterates[i] - iterates[k]).trace_of_square();
      if (!thetas.empty()) d2 += (thetas[i] - thetas[k]) * (thetas[i] - thetas[k]);
      if (!(std::sqrt(d2) > radius)) return false;
    }
  }
  return true;
}

SolveResult solve(ConicProgram program, const CutOracle& oracle, const SolverBackend& backend,
                  const EngineConfig& config, const EngineHooks& hooks) {
  config.validate(backend.feasibility_tolerance());
  if (config.ridge_gamma && !program.find_variable("ridge")) add_ridge(program, *config.ridge_gamma);
  const bool epigraph = config.cuts == CutMode::nuclear_epigraph;
  if (epigraph && !program.theta) throw DomainError("epigraph cuts need a program with a theta variable");
  if (!program.has_trace_row() && !program.find_variable("ridge")) {
    throw DomainError("master problem is unbounded: add a trace bound or a ridge term");
  }
  program.validate();

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const int n = program.order;
  SolveResult res;
  res.lipschitz = lipschitz_constant(family_of(config.cuts), n);

  double prev_bound = 0.0, prev_violation = 0.0;
  int flat = 0;
  for (int t = 0;; ++t) {
    const BackendSolution sol = solve_master(backend, program);
    if (sol.status != SolveStatus::optimal) {
      res.status = EngineStatus::backend_failure;
      res.termination = std::string("master ") + to_string(sol.status) +
                        (program.cuts.empty() ? "" : " after cut addition") + ": " + sol.backend_status;
      break;
    }
    const double scale_base = epigraph ? sol.theta.value_or(0.0) : std::abs(sol.matrix.trace());
    const double eps_t =
        config.scaling == ViolationScaling::trace_relative ? config.eps * std::max(1.0, scale_base) : config.eps;
    OracleReport rep = oracle(sol.matrix, eps_t, sol.theta);

    IterationRecord rec;
    rec.t = t;
    rec.bound = sol.objective;
    rec.violation = rep.violation;
    rec.cuts_total = static_cast<int>(program.cuts.size());
    if (hooks.upper_bound) rec.upper_bound = hooks.upper_bound(sol);
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    res.trace.push_back(rec);
    if (config.keep_iterates) {
      res.iterates.push_back(sol.matrix);
      if (sol.theta) res.iterate_thetas.push_back(*sol.theta);
    }
    res.x = sol.matrix;
    res.theta = sol.theta;
    res.values = sol.values;
    res.final_bound = sol.objective;
    res.final_violation = rep.violation;

    if (t == 0) {
      double tb = program.trace_bound.value_or(0.0);
      if (!(tb > 0.0)) tb = std::max(1.0, sol.theta.value_or(nuclear_norm(sol.matrix)));
      res.log_iteration_bound = theoretical_iteration_bound(res.lipschitz, tb, config.eps, n);
    }

    if (rep.feasible) {
      res.status = EngineStatus::converged;
      res.termination = "epsilon_feasible";
      break;
    }
    if (hooks.stop) {
      if (auto d = hooks.stop(rec)) {
        res.status = d->status;
        res.termination = d->reason;
        break;
      }
    }
    if (t + 1 >= config.max_iterations) {
      res.status = EngineStatus::iteration_limit;
      res.termination = "iteration_limit";
      break;
    }
    if (t > 0 && std::abs(rec.bound - prev_bound) < config.stall_tol &&
        std::abs(rec.violation - prev_violation) < config.stall_tol) {
      if (++flat >= config.stall_window) {
        res.status = EngineStatus::iteration_limit;
        res.termination = "stalled";
        res.stalled = true;
        break;
      }
    } else {
      flat = 0;
    }
    prev_bound = rec.bound;
    prev_violation = rec.violation;

    if (config.retention == CutRetention::drop_inactive) {
      std::vector<LinearCut> kept;
      const double th = sol.theta.value_or(0.0);
      for (auto& c : program.cuts) {
        const bool old = t - c.birth >= config.drop_age;
        if (!old || evaluate_cut(c, th, sol.matrix) > -eps_t) kept.push_back(std::move(c));
      }
      program.cuts = std::move(kept);
    }
    for (auto& c : rep.cuts) {
      c.birth = t;
      append_cut(program, std::move(c));
    }
  }
  res.final_program = std::move(program);
  return res;
}

SolveResult solve(ConicProgram program, const SolverBackend& backend, const EngineConfig& config,
                  const EngineHooks& hooks) {
  return solve(std::move(program), make_oracle(config), backend, config, hooks);
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << "iteration,bound,violation,cuts_total,upper_bound,seconds\n";
  out << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.t << ',' << r.bound << ',' << r.violation << ',' << r.cuts_total << ',';
    if (r.upper_bound) out << *r.upper_bound;
    out << ',' << std::setprecision(6) << r.seconds << std::setprecision(17) << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_trace_csv(out, trace);
}

}  // namespace sdpcut
