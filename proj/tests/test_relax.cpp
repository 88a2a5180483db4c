#include <doctest.h>

#include <cmath>
#include <random>

#include "sdpcut/errors.hpp"
#include "sdpcut/ipm.hpp"
#include "sdpcut/relax.hpp"
#include "sdpcut/spca.hpp"
#include "support/reference.hpp"

using namespace sdpcut;

namespace {

SDPInstance trace_instance(const SymMat& c, double t, TraceMode mode = TraceMode::equality) {
  SDPInstance s;
  s.order = c.order();
  s.objective = c;
  s.trace_bound = t;
  s.trace_mode = mode;
  return s;
}

std::vector<double> values_of(const ConicProgram& p, const SymMat& x) {
  std::vector<double> v(x.packed());
  v.resize(p.num_vars(), 0.0);
  return v;
}

bool feasible(const ConicProgram& p, const std::vector<double>& v, double tol = 1e-12) {
  for (const auto& r : p.rows)
    if (r.violation(v) > tol) return false;
  for (const auto& c : p.cones)
    if (c.violation(v) > tol) return false;
  return true;
}

SymMat mat2(double a, double b, double c) {
  SymMat m(2);
  m.set(0, 0, a);
  m.set(0, 1, b);
  m.set(1, 1, c);
  return m;
}

}  // namespace

TEST_CASE("LP minor relaxation membership") {
  const ConicProgram p = build_lp_minor_relaxation(trace_instance(SymMat::identity(2), 1.0));
  CHECK(feasible(p, values_of(p, mat2(1, 0, 0))));
  CHECK_FALSE(feasible(p, values_of(p, mat2(0.5, 0.6, 0.5))));
  CHECK(feasible(p, values_of(p, mat2(0.5, 0.5, 0.5))));
  for (int n : {1, 3, 7}) {
    const ConicProgram q = build_lp_minor_relaxation(trace_instance(SymMat::identity(n), 1.0));
    SymMat x = SymMat::identity(n);
    x *= 1.0 / n;
    CHECK(feasible(q, values_of(q, x)));
  }
}

TEST_CASE("SOC minor relaxation membership") {
  const ConicProgram p = build_soc_minor_relaxation(trace_instance(SymMat::identity(2), 1.0));
  CHECK(feasible(p, values_of(p, mat2(1, 0, 0))));
  CHECK_FALSE(feasible(p, values_of(p, mat2(0.5, 0.6, 0.5))));
  CHECK(feasible(p, values_of(p, mat2(0.5, 0.5, 0.5)), 1e-12));
  CHECK(lambda_min(mat2(0.5, 0.5, 0.5)) >= -1e-15);
}

TEST_CASE("SOC region sits inside the LP region; the witness shows strictness") {
  InteriorPointBackend be;
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 6;
    const SDPInstance s = trace_instance(ref::random_symmetric(n, rng), 1.0 + trial % 3);
    const ConicProgram soc = build_soc_minor_relaxation(s);
    const ConicProgram lp = build_lp_minor_relaxation(s);
    const BackendSolution sol = solve_master(be, soc);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(feasible(lp, values_of(lp, sol.matrix), 1e-7));
  }
  // X11 = X22 = 0.5, X12 = 0.6 violates both regions; a strict witness needs unequal diagonals
  const SDPInstance w = trace_instance(SymMat::identity(2), 1.0);
  CHECK_FALSE(feasible(build_lp_minor_relaxation(w), values_of(build_lp_minor_relaxation(w), mat2(0.5, 0.6, 0.5))));
  const SymMat y = mat2(0.9, 0.4, 0.1);  // 0.16 > 0.09, yet 0.9 + 0.1 - 0.8 >= 0
  CHECK(feasible(build_lp_minor_relaxation(w), values_of(build_lp_minor_relaxation(w), y)));
  CHECK_FALSE(feasible(build_soc_minor_relaxation(w), values_of(build_soc_minor_relaxation(w), y)));
}

TEST_CASE("relaxation optima respect the lambda_min and norm certificates") {
  InteriorPointBackend be;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> tdist(0.5, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 7;
    const double t = tdist(rng);
    const SDPInstance s = trace_instance(ref::random_symmetric(n, rng), t);
    const BackendSolution lp = solve_master(be, build_lp_minor_relaxation(s));
    const BackendSolution soc = solve_master(be, build_soc_minor_relaxation(s));
    REQUIRE(lp.status == SolveStatus::optimal);
    REQUIRE(soc.status == SolveStatus::optimal);
    CHECK(ref::jacobi_lambda_min(lp.matrix) >= lambda_min_bound_lp(n, t) - 1e-6);
    CHECK(lp.matrix.entrywise_l1() <= n * t + 1e-6);
    CHECK(ref::jacobi_lambda_min(soc.matrix) >= lambda_min_bound_soc(n, t) - 1e-6);
    CHECK(soc.matrix.frobenius_norm() <= t + 1e-6);
    // the smaller SOC region gives the larger minimum
    CHECK(soc.objective >= lp.objective - 1e-6);
  }
}

TEST_CASE("trace inequality mode") {
  InteriorPointBackend be;
  // min <I, X> with tr X <= 2 is attained at X = 0
  const BackendSolution s =
      solve_master(be, build_soc_minor_relaxation(trace_instance(SymMat::identity(3), 2.0, TraceMode::inequality)));
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("missing trace bound is rejected") {
  SDPInstance s;
  s.order = 2;
  s.objective = SymMat::identity(2);
  CHECK_THROWS_AS(build_soc_minor_relaxation(s), DomainError);
  CHECK_THROWS_AS(build_relaxation(trace_instance(SymMat::identity(2), 1.0), RelaxationKind::soc_aggregated),
                  UnsupportedError);
}

TEST_CASE("aggregated SOC relaxation membership") {
  SpcaInstance inst;
  inst.sigma = SymMat::identity(2);
  inst.k = 1;
  const ConicProgram p = build_aggregated_soc_relaxation(inst);
  auto with_z = [&](const SymMat& x, std::vector<double> z) {
    std::vector<double> v = values_of(p, x);
    for (int i = 0; i < 2; ++i) v[*p.find_variable("z" + std::to_string(i))] = z[i];
    return v;
  };
  CHECK(feasible(p, with_z(mat2(1, 0, 0), {1, 0})));
  CHECK(feasible(p, with_z(mat2(0.5, 0, 0.5), {0.5, 0.5}), 1e-12));
  CHECK_FALSE(feasible(p, with_z(mat2(0.5, 0, 0.5), {0.4, 0.6})));
  SpcaInstance bad = inst;
  bad.trace_mode = TraceMode::inequality;
  CHECK_THROWS_AS(build_aggregated_soc_relaxation(bad), DomainError);
}

TEST_CASE("aggregated bound is weaker than the full SOC bound") {
  InteriorPointBackend be;
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 8; ++trial) {
    SpcaInstance inst;
    inst.sigma = ref::random_correlation(6 + trial % 4, rng);
    inst.k = 2 + trial % 3;
    const BackendSolution full = solve_master(be, spca_relaxation(inst, SpcaMode::full));
    const BackendSolution agg = solve_master(be, spca_relaxation(inst, SpcaMode::aggregated));
    REQUIRE(full.status == SolveStatus::optimal);
    REQUIRE(agg.status == SolveStatus::optimal);
    CHECK(agg.objective >= full.objective - 1e-6);
  }
}

TEST_CASE("diameter bounds") {
  CHECK(diameter_bound(RelaxationKind::lp_minor, 10, 1.0) == doctest::Approx(20.0));
  CHECK(diameter_bound(RelaxationKind::soc_minor, 10, 1.0) == doctest::Approx(2.0));
  CHECK(diameter_bound(RelaxationKind::lp_minor, 1, 1.0) == diameter_bound(RelaxationKind::soc_minor, 1, 1.0));
}
