#include "sdpcut/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <set>

#include "sdpcut/errors.hpp"
#include "sdpcut/serialization.hpp"

namespace sdpcut {

void CompletionInstance::validate() const {
  if (n < 1) throw DomainError("completion order must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
  std::set<std::pair<int, int>> seen;
  for (const auto& o : observations) {
    if (o.i < 0 || o.j < 0 || o.i >= n || o.j >= n) throw DomainError("observation index out of range");
    if (o.i > o.j) throw DomainError("observations must satisfy i <= j");
    if (!std::isfinite(o.value)) throw DomainError("observation value is not finite");
    if (!seen.emplace(o.i, o.j).second) {
      throw DomainError("duplicate observation (" + std::to_string(o.i) + ", " + std::to_string(o.j) + ")");
    }
  }
}

CompletionInstance generate_completion_instance(int n, int rank, double fraction, std::uint64_t seed) {
  if (n < 1) throw DomainError("n must be positive");
  if (rank < 1 || rank > n) throw DomainError("rank must lie in [1, n]");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("sample fraction must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd u(n, rank), v(n, rank);
  for (int c = 0; c < rank; ++c) {
    for (int r = 0; r < n; ++r) u(r, c) = normal(rng);
  }
  for (int c = 0; c < rank; ++c) {
    for (int r = 0; r < n; ++r) v(r, c) = normal(rng);
  }
  const Eigen::MatrixXd a = 0.5 * (u * v.transpose() + v * u.transpose());

  std::vector<std::pair<int, int>> pos;
  pos.reserve(packed_size(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) pos.emplace_back(i, j);
  }
  const auto total = pos.size();
  const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));
  // partial Fisher-Yates
  for (std::size_t k = 0; k < m; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(pos[k], pos[pick(rng)]);
  }
  pos.resize(m);
  std::sort(pos.begin(), pos.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second < y.second : x.first < y.first;
  });

  CompletionInstance inst;
  inst.n = n;
  inst.gamma = 1.0 / n;
  for (const auto& [i, j] : pos) inst.observations.push_back({i, j, a(i, j)});
  return inst;
}

ConicProgram completion_program(const CompletionInstance& instance) {
  instance.validate();
  ConicProgram p(instance.n);
  const int theta = p.add_variable("theta", 1.0);
  p.theta = theta;
  add_frobenius_epigraph(p, theta);
  add_ridge(p, instance.gamma);
  for (const auto& o : instance.observations) {
    p.rows.push_back({{{p.matrix_var(o.i, o.j), 1.0}}, RowSense::equal, o.value});
  }
  return p;
}

double completion_objective(const SymMat& x, double gamma) {
  return nuclear_norm(x) + x.trace_of_square() / gamma;
}

EngineConfig completion_default_config() {
  EngineConfig c;
  c.cuts = CutMode::nuclear_epigraph;
  c.max_cuts_per_iter = 1;
  return c;
}

SolveResult complete(const CompletionInstance& instance, const SolverBackend& backend, const EngineConfig& config,
                     double gap_tol) {
  if (config.cuts != CutMode::nuclear_epigraph) throw DomainError("completion runs with nuclear epigraph cuts");
  if (!(gap_tol >= 0.0)) throw DomainError("gap tolerance must be non-negative");
  auto best = std::make_shared<double>(std::numeric_limits<double>::infinity());
  const double gamma = instance.gamma;
  EngineHooks hooks;
  hooks.upper_bound = [best, gamma](const BackendSolution& sol) -> std::optional<double> {
    *best = std::min(*best, completion_objective(sol.matrix, gamma));
    return *best;
  };
  hooks.stop = [gap_tol](const IterationRecord& r) -> std::optional<StopDecision> {
    if (!r.upper_bound) return std::nullopt;
    const double ub = *r.upper_bound;
    if (ub - r.bound <= gap_tol * std::abs(ub)) return StopDecision{EngineStatus::converged, "gap_closed"};
    return std::nullopt;
  };
  return solve(completion_program(instance), backend, config, hooks);
}

double max_observation_error(const CompletionInstance& instance, const SymMat& x) {
  double e = 0.0;
  for (const auto& o : instance.observations) e = std::max(e, std::abs(x(o.i, o.j) - o.value));
  return e;
}

nlohmann::json to_json(const CompletionInstance& instance) {
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : instance.observations) obs.push_back({o.i, o.j, o.value});
  return {{"format_version", kFormatVersion}, {"n", instance.n}, {"gamma", instance.gamma}, {"observations", obs}};
}

CompletionInstance completion_from_json(const nlohmann::json& j) {
  CompletionInstance inst;
  try {
    if (j.contains("format_version") && j.at("format_version").get<int>() > kFormatVersion) {
      throw ParseError("unsupported format_version", 0);
    }
    inst.n = j.at("n").get<int>();
    inst.gamma = j.contains("gamma") && !j.at("gamma").is_null() ? j.at("gamma").get<double>() : 1.0 / inst.n;
    for (const auto& o : j.at("observations")) {
      if (!o.is_array() || o.size() != 3) throw ParseError("observations must be [i, j, value] triples", 0);
      int a = o.at(0).get<int>(), b = o.at(1).get<int>();
      if (a > b) std::swap(a, b);
      inst.observations.push_back({a, b, o.at(2).get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad completion instance: ") + e.what(), 0);
  }
  inst.validate();
  return inst;
}

}  // namespace sdpcut
