#include <doctest.h>

#include <cmath>
#include <random>

#include "sdpcut/errors.hpp"
#include "sdpcut/ipm.hpp"
#include "sdpcut/model.hpp"
#include "sdpcut/oracle.hpp"
#include "sdpcut/relax.hpp"
#include "sdpcut/serialization.hpp"
#include "support/reference.hpp"

using namespace sdpcut;

namespace {

LinearCut eig_cut(const Eigen::VectorXd& q) {
  LinearCut c;
  c.matrix = LowRankMatrix{-1.0, {{1.0, q.normalized()}}};
  return c;
}

SDPInstance spectraplex(const SymMat& c) {
  SDPInstance s;
  s.order = c.order();
  s.objective = c;
  s.trace_bound = 1.0;
  s.trace_mode = TraceMode::equality;
  return s;
}

}  // namespace

TEST_CASE("add_cut appends rows without deduplication") {
  ConicProgram p(2);
  const LinearCut c = eig_cut(Eigen::Vector2d(0, 1));
  ConicProgram q = add_cut(p, c);
  CHECK(p.cuts.empty());
  CHECK(q.cuts.size() == 1);
  q = add_cut(q, c);
  CHECK(q.cuts.size() == 2);
  CHECK(q.num_linear_rows() == 2);
}

TEST_CASE("low-rank cut row evaluates to -q'Xq") {
  ConicProgram p(2);
  const Eigen::Vector2d q = Eigen::Vector2d(1, 2).normalized();
  const LinearCut c = eig_cut(q);
  const LinearRow row = cut_row(p, c);
  SymMat x(2);
  x.set(0, 0, 0.3);
  x.set(0, 1, -0.7);
  x.set(1, 1, 1.1);
  std::vector<double> vals(x.packed());
  const double expect = -(q(0) * q(0) * 0.3 + 2 * q(0) * q(1) * -0.7 + q(1) * q(1) * 1.1);
  CHECK(row.violation(vals) == doctest::Approx(expect));
  CHECK(evaluate_cut(c, 0.0, x) == doctest::Approx(expect));
}

TEST_CASE("evaluate_cut examples") {
  const SymMat x = SymMat::diagonal(Eigen::Vector2d(1, -1));
  CHECK(evaluate_cut(eig_cut(Eigen::Vector2d(0, 1)), 0.0, x) == doctest::Approx(1.0));

  LinearCut epi;
  epi.theta_coef = -1.0;
  epi.matrix = SymMat::diagonal(Eigen::Vector2d(1, -1));
  epi.family = CutFamily::nuclear;
  CHECK(evaluate_cut(epi, 0.0, x) == doctest::Approx(2.0));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const SymMat y = ref::random_symmetric(5, rng);
    for (const LinearCut& c : nuclear_cut_oracle(y, 1e-300, NuclearMode::membership).cuts) {
      CHECK(evaluate_cut(c, 0.0, ref::random_psd(5, 3, rng)) <= 1e-9);
    }
  }
}

TEST_CASE("append_cut rejects malformed cuts") {
  ConicProgram p(3);
  CHECK_THROWS_AS(append_cut(p, eig_cut(Eigen::Vector2d(1, 0))), DimensionError);
  LinearCut c;
  c.theta_coef = -1.0;
  c.matrix = SymMat::identity(3);
  CHECK_THROWS_AS(append_cut(p, c), DimensionError);
  LinearCut nonunit;
  nonunit.matrix = LowRankMatrix{-1.0, {{1.0, Eigen::Vector3d(1, 1, 0)}}};
  CHECK_THROWS(append_cut(p, nonunit));
}

TEST_CASE("solve_master on the spectraplex relaxation") {
  InteriorPointBackend be;
  const SymMat c = SymMat::diagonal(Eigen::Vector3d(3, 1, 2));
  const ConicProgram p = build_soc_minor_relaxation(spectraplex(c));
  const BackendSolution s = solve_master(be, p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective <= 1.0 + 1e-7);
  CHECK(s.matrix.trace() == doctest::Approx(1.0));
}

TEST_CASE("solve_master reports infeasible equalities") {
  InteriorPointBackend be;
  SDPInstance s = spectraplex(SymMat::identity(2));
  s.equalities.push_back({SymMat::identity(2), 2.0});
  const BackendSolution sol = solve_master(be, build_soc_minor_relaxation(s));
  CHECK(sol.status == SolveStatus::infeasible);
}

TEST_CASE("maximization is reported in its own sense") {
  InteriorPointBackend be;
  SDPInstance s = spectraplex(SymMat::diagonal(Eigen::Vector3d(3, 1, 2)));
  s.sense = ObjectiveSense::maximize;
  const BackendSolution sol = solve_master(be, build_soc_minor_relaxation(s));
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("master objective is non-decreasing as cuts accumulate") {
  InteriorPointBackend be;
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    ConicProgram p = build_soc_minor_relaxation(spectraplex(ref::random_symmetric(6, rng)));
    double last = -1e300;
    for (int round = 0; round < 8; ++round) {
      const BackendSolution s = solve_master(be, p);
      REQUIRE(s.status == SolveStatus::optimal);
      CHECK(s.objective >= last - 1e-7);
      last = s.objective;
      const OracleReport r = eig_cut_oracle(s.matrix, 1e-9, 3);
      if (r.feasible) break;
      for (const auto& c : r.cuts) append_cut(p, c);
    }
  }
}

TEST_CASE("ridge models s >= ||X||_F^2 exactly at the optimum") {
  InteriorPointBackend be;
  ConicProgram p(2);
  const int s = add_ridge(p, 0.5);
  p.rows.push_back({{{p.matrix_var(0, 0), 1.0}}, RowSense::equal, 1.0});
  p.rows.push_back({{{p.matrix_var(0, 1), 1.0}}, RowSense::equal, 0.5});
  // X22 is free: the optimum sets it to 0 and s to 1 + 2 * 0.25
  const BackendSolution sol = solve_master(be, p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.values[s] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(sol.matrix(1, 1) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("Frobenius epigraph") {
  InteriorPointBackend be;
  ConicProgram p(2);
  const int t = p.add_variable("theta", 1.0);
  p.theta = t;
  add_frobenius_epigraph(p, t);
  p.rows.push_back({{{p.matrix_var(0, 1), 1.0}}, RowSense::equal, 1.0});
  const BackendSolution sol = solve_master(be, p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(*sol.theta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("serialization round trip is bit-exact") {
  std::mt19937_64 rng(99);
  ConicProgram p = build_soc_minor_relaxation(spectraplex(ref::random_symmetric(5, rng)));
  const int t = p.add_variable("theta", 1.0);
  p.theta = t;
  add_ridge(p, 0.3);
  for (const auto& c : eig_cut_oracle(ref::random_symmetric(5, rng), 1e-300, 2).cuts) append_cut(p, c);
  LinearCut dense;
  dense.theta_coef = -1.0;
  dense.matrix = nuclear_maximizer(ref::random_symmetric(5, rng));
  dense.family = CutFamily::nuclear;
  append_cut(p, dense);

  const nlohmann::json j = to_json(p);
  CHECK(j.at("format_version") == kFormatVersion);
  const ConicProgram q = program_from_json(nlohmann::json::parse(j.dump()));
  CHECK(q.order == p.order);
  CHECK(q.cost == p.cost);
  CHECK(q.rows == p.rows);
  CHECK(q.cones == p.cones);
  CHECK(q.aux_names == p.aux_names);
  CHECK(q.theta == p.theta);
  REQUIRE(q.cuts.size() == p.cuts.size());
  for (std::size_t i = 0; i < p.cuts.size(); ++i) {
    CHECK(q.cuts[i].dense_matrix() == p.cuts[i].dense_matrix());
    CHECK(q.cuts[i].theta_coef == p.cuts[i].theta_coef);
    CHECK(q.cuts[i].is_low_rank() == p.cuts[i].is_low_rank());
  }
  const LoweredProgram a = lower(p), b = lower(q);
  CHECK(a.problem.c == b.problem.c);
  CHECK(Eigen::MatrixXd(a.problem.G) == Eigen::MatrixXd(b.problem.G));
  CHECK(a.problem.h == b.problem.h);

  nlohmann::json newer = j;
  newer["format_version"] = kFormatVersion + 1;
  CHECK_THROWS_AS(program_from_json(newer), ParseError);
}

TEST_CASE("backend solution round trip") {
  InteriorPointBackend be;
  const BackendSolution s =
      solve_master(be, build_soc_minor_relaxation(spectraplex(SymMat::diagonal(Eigen::Vector3d(3, 1, 2)))));
  const BackendSolution r = solution_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(r.status == s.status);
  CHECK(r.values == s.values);
  CHECK(r.matrix == s.matrix);
  CHECK(r.objective == s.objective);
}
