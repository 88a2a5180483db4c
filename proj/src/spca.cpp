#include "sdpcut/spca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdpcut/errors.hpp"
#include "sdpcut/relax.hpp"

namespace sdpcut {

void SpcaInstance::validate() const {
  const int n = sigma.order();
  if (n < 1) throw DomainError("covariance matrix is empty");
  if (k < 1 || k > n) throw DomainError("sparsity budget k must lie in [1, n]");
  const double lmin = lambda_min(sigma);
  if (lmin < -1e-8 * sigma.frobenius_norm()) {
    throw DomainError("covariance matrix is not positive semidefinite (lambda_min = " + std::to_string(lmin) + ")");
  }
}

ConicProgram spca_relaxation(const SpcaInstance& instance, SpcaMode mode) {
  instance.validate();
  if (mode == SpcaMode::aggregated) return build_aggregated_soc_relaxation(instance);
  if (instance.trace_mode != TraceMode::equality) {
    throw DomainError("sparse PCA relaxations use tr X = 1");
  }
  SDPInstance sdp;
  sdp.order = instance.sigma.order();
  sdp.objective = instance.sigma;
  sdp.trace_bound = 1.0;
  sdp.trace_mode = TraceMode::equality;
  sdp.sense = ObjectiveSense::maximize;
  ConicProgram p = build_soc_minor_relaxation(sdp);
  LinearRow budget;
  budget.sense = RowSense::less_equal;
  budget.rhs = instance.k;
  for (int j = 0; j < p.order; ++j) {
    for (int i = 0; i <= j; ++i) {
      const int t = p.add_variable("abs_" + std::to_string(i) + "_" + std::to_string(j));
      const int x = p.matrix_var(i, j);
      p.rows.push_back({{{t, 1.0}, {x, -1.0}}, RowSense::greater_equal, 0.0});
      p.rows.push_back({{{t, 1.0}, {x, 1.0}}, RowSense::greater_equal, 0.0});
      budget.terms.push_back({t, i == j ? 1.0 : 2.0});
    }
  }
  p.rows.push_back(std::move(budget));
  return p;
}

namespace {

double principal_lambda_max(const SymMat& sigma, const std::vector<int>& s) {
  const int k = static_cast<int>(s.size());
  Eigen::MatrixXd sub(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) sub(a, b) = sigma(s[a], s[b]);
  }
  if (k == 1) return sub(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on a principal submatrix");
  return es.eigenvalues()(k - 1);
}

void check_k(const SymMat& sigma, int k) {
  if (k < 1 || k > sigma.order()) throw DomainError("sparsity budget k must lie in [1, n]");
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

SpcaLowerBound spca_greedy_lower_bound(const SymMat& sigma, int k) {
  check_k(sigma, k);
  const int n = sigma.order();
  const SpectralDecomp d = eigh(sigma);
  const Eigen::VectorXd v = d.vectors.col(n - 1);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
  std::vector<int> support(order.begin(), order.begin() + k);
  std::sort(support.begin(), support.end());
  double value = principal_lambda_max(sigma, support);

  for (int pass = 0; pass < 1000; ++pass) {
    std::vector<char> in(n, 0);
    for (int i : support) in[i] = 1;
    double best = value;
    int best_out = -1, best_in = -1;
    for (int a = 0; a < k; ++a) {
      for (int j = 0; j < n; ++j) {
        if (in[j]) continue;
        std::vector<int> trial = support;
        trial[a] = j;
        const double val = principal_lambda_max(sigma, trial);
        if (val > best + 1e-12 * std::max(1.0, std::abs(best))) {
          best = val;
          best_out = a;
          best_in = j;
        }
      }
    }
    if (best_out < 0) break;
    support[best_out] = best_in;
    std::sort(support.begin(), support.end());
    value = best;
  }
  return {value, support, "greedy_swap"};
}

SpcaLowerBound spca_exact_small(const SymMat& sigma, int k) {
  check_k(sigma, k);
  const int n = sigma.order();
  if (binomial(n, k) > 2e6) throw DomainError("exhaustive enumeration budget of 2e6 subsets exceeded");
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  SpcaLowerBound best{-std::numeric_limits<double>::infinity(), s, "exact"};
  while (true) {
    const double val = principal_lambda_max(sigma, s);
    if (val > best.value) {
      best.value = val;
      best.support = s;
    }
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return best;
}

EngineConfig spca_default_config() {
  EngineConfig c;
  c.cuts = CutMode::eig;
  c.max_cuts_per_iter = 1;
  return c;
}

SpcaBoundResult spca_upper_bound(const SpcaInstance& instance, const SolverBackend& backend,
                                 const EngineConfig& config, const std::vector<int>& checkpoints,
                                 SpcaMode mode) {
  if (checkpoints.empty()) throw DomainError("at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw DomainError("checkpoints must be non-negative and strictly ascending");
    }
  }
  if (config.cuts != CutMode::eig) throw DomainError("sparse PCA bounds use trailing-eigenvalue cuts");
  const auto start = std::chrono::steady_clock::now();
  SpcaBoundResult out;
  out.mode = mode;

  const int n = instance.sigma.order();
  out.lower_bound = binomial(n, instance.k) <= 2e6 ? spca_exact_small(instance.sigma, instance.k)
                                                   : spca_greedy_lower_bound(instance.sigma, instance.k);

  const int last = checkpoints.back();
  EngineHooks hooks;
  hooks.stop = [last](const IterationRecord& r) -> std::optional<StopDecision> {
    if (r.cuts_total >= last) return StopDecision{EngineStatus::converged, "cut_budget"};
    return std::nullopt;
  };
  const SolveResult res = solve(spca_relaxation(instance, mode), backend, config, hooks);
  out.engine_status = res.status;
  out.termination = res.termination;
  out.trace = res.trace;
  out.iterates = res.iterates;
  out.lipschitz = res.lipschitz;
  if (res.status == EngineStatus::backend_failure) throw NumericalError("sparse PCA master failed: " + res.termination);

  const double lb = out.lower_bound.value;
  for (int c : checkpoints) {
    // Bound of the last master holding at most c cuts; once the iterate is
    // eps-feasible no further cuts exist and the final bound stands.
    const IterationRecord* rec = &res.trace.front();
    for (const auto& r : res.trace) {
      if (r.cuts_total <= c) rec = &r;
    }
    SpcaCheckpoint cp;
    cp.cuts = c;
    cp.upper_bound = rec->bound;
    cp.gap_percent = (rec->bound - lb) / lb * 100.0;
    cp.seconds = rec->seconds;
    out.checkpoints.push_back(cp);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace sdpcut
