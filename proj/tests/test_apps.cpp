#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "sdpcut/completion.hpp"
#include "sdpcut/errors.hpp"
#include "sdpcut/ipm.hpp"
#include "sdpcut/matrix_market.hpp"
#include "sdpcut/spca.hpp"
#include "support/reference.hpp"

using namespace sdpcut;

namespace {

SymMat pitprops() { return read_matrix_market_file(std::string(SDPCUT_DATA_DIR) + "/pitprops.mtx"); }

// Regression constant: best 5-subset of Pitprops, {topdiam, length, ringbut, bowdist, whorls}.
constexpr double kPitpropsK5 = 3.406154946789762;

std::vector<std::tuple<int, int, double>> obs_of(const CompletionInstance& c) {
  std::vector<std::tuple<int, int, double>> o;
  for (const auto& x : c.observations) o.emplace_back(x.i, x.j, x.value);
  return o;
}

}  // namespace

TEST_CASE("SPCA relaxation edge cases") {
  InteriorPointBackend be;
  SpcaInstance id;
  id.sigma = SymMat::identity(5);
  id.k = 5;
  const BackendSolution s = solve_master(be, spca_relaxation(id, SpcaMode::full));
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));

  std::mt19937_64 rng(2);
  SpcaInstance one;
  one.sigma = ref::random_correlation(6, rng);
  one.sigma.set(3, 3, 1.7);
  one.k = 1;
  const BackendSolution t = solve_master(be, spca_relaxation(one, SpcaMode::full));
  REQUIRE(t.status == SolveStatus::optimal);
  CHECK(t.objective >= 1.7 - 1e-7);
}

TEST_CASE("instance validation") {
  SpcaInstance bad;
  bad.sigma = SymMat::diagonal(Eigen::Vector2d(1, -1));
  bad.k = 1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.sigma = SymMat::identity(2);
  bad.k = 3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("lower bounds") {
  const SymMat d = SymMat::diagonal(Eigen::Vector3d(5, 2, 1));
  const SpcaLowerBound g = spca_greedy_lower_bound(d, 1);
  CHECK(g.value == doctest::Approx(5.0));
  CHECK(g.support == std::vector<int>{0});
  CHECK(spca_exact_small(d, 2).value == doctest::Approx(5.0));
  CHECK(spca_exact_small(SymMat::identity(6), 3).value == doctest::Approx(1.0));
  std::mt19937_64 rng(19);
  const SymMat c = ref::random_correlation(7, rng);
  CHECK(spca_greedy_lower_bound(c, 7).value == doctest::Approx(ref::jacobi_eigenvalues(c.dense()).back()));
  CHECK(binomial(13, 10) == 286.0);
  CHECK_THROWS_AS(spca_exact_small(SymMat::identity(60), 30), DomainError);
}

TEST_CASE("pitprops lower bounds") {
  const SymMat p = pitprops();
  CHECK(spca_exact_small(p, 5).value == doctest::Approx(kPitpropsK5).epsilon(1e-12));
  CHECK(ref::spca_enumerate(p, 5) == doctest::Approx(kPitpropsK5).epsilon(1e-12));
  const double exact10 = ref::spca_enumerate(p, 10);
  CHECK(spca_exact_small(p, 10).value == doctest::Approx(exact10).epsilon(1e-12));
  CHECK(spca_greedy_lower_bound(p, 10).value == doctest::Approx(exact10).epsilon(1e-12));
}

TEST_CASE("SPCA sandwich and monotone checkpoints on random correlations") {
  InteriorPointBackend be;
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 4; ++trial) {
    SpcaInstance inst;
    inst.sigma = ref::random_correlation(8, rng);
    inst.k = 3;
    const double exact = ref::spca_enumerate(inst.sigma, 3);
    const SpcaBoundResult r = spca_upper_bound(inst, be, spca_default_config(), {0, 5, 20});
    CHECK(r.lower_bound.method == "exact");
    CHECK(r.lower_bound.value == doctest::Approx(exact).epsilon(1e-12));
    CHECK(spca_greedy_lower_bound(inst.sigma, 3).value <= exact + 1e-12);
    REQUIRE(r.checkpoints.size() == 3);
    CHECK(r.checkpoints[0].upper_bound >= r.checkpoints[1].upper_bound - 1e-7);
    CHECK(r.checkpoints[1].upper_bound >= r.checkpoints[2].upper_bound - 1e-7);
    CHECK(r.checkpoints[2].upper_bound >= exact - 1e-7);
    for (const auto& c : r.checkpoints) {
      CHECK(c.gap_percent == doctest::Approx(100.0 * (c.upper_bound - exact) / exact));
    }
  }
}

TEST_CASE("k = n on a nonnegative correlation matrix closes the gap at once") {
  InteriorPointBackend be;
  std::mt19937_64 rng(5);
  SpcaInstance inst;
  inst.sigma = ref::random_correlation(6, rng);
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < j; ++i) inst.sigma.set(i, j, std::abs(inst.sigma(i, j)));
  // |entries| of a correlation matrix need not stay PSD; shift the diagonal
  const double lmin = ref::jacobi_lambda_min(inst.sigma);
  if (lmin < 0)
    for (int i = 0; i < 6; ++i) inst.sigma.add(i, i, -lmin + 0.1);
  inst.k = 6;
  const SpcaBoundResult r = spca_upper_bound(inst, be, spca_default_config(), {0});
  CHECK(r.checkpoints[0].gap_percent < 1e-5);
}

TEST_CASE("checkpoint arguments are validated") {
  InteriorPointBackend be;
  SpcaInstance inst;
  inst.sigma = SymMat::identity(3);
  inst.k = 2;
  CHECK_THROWS_AS(spca_upper_bound(inst, be, spca_default_config(), {}), DomainError);
  CHECK_THROWS_AS(spca_upper_bound(inst, be, spca_default_config(), {5, 0}), DomainError);
  EngineConfig nuc = spca_default_config();
  nuc.cuts = CutMode::nuclear_membership;
  CHECK_THROWS_AS(spca_upper_bound(inst, be, nuc, {0}), DomainError);
}

TEST_CASE("completion instance generator") {
  const CompletionInstance full = generate_completion_instance(7, 2, 1.0, 1);
  CHECK(full.observations.size() == 28);
  for (int n : {6, 9, 12}) {
    const CompletionInstance half = generate_completion_instance(n, n, 0.5, 2);
    CHECK(half.observations.size() == static_cast<std::size_t>(n * (n + 1) / 4));
    CHECK(half.gamma == doctest::Approx(1.0 / n));
  }
  const CompletionInstance a = generate_completion_instance(10, 2, 0.5, 77);
  const CompletionInstance b = generate_completion_instance(10, 2, 0.5, 77);
  CHECK(a.observations == b.observations);
  const CompletionInstance c = generate_completion_instance(10, 2, 0.5, 78);
  CHECK_FALSE(a.observations == c.observations);
  // values come from a matrix of rank at most 2r
  const CompletionInstance f = generate_completion_instance(12, 2, 1.0, 4);
  SymMat m(12);
  for (const auto& o : f.observations) m.set(o.i, o.j, o.value);
  int big = 0;
  for (double l : ref::jacobi_eigenvalues(m.dense()))
    if (std::abs(l) > 1e-9) ++big;
  CHECK(big <= 4);
  CHECK_THROWS_AS(generate_completion_instance(5, 6, 0.5, 1), DomainError);
  CHECK_THROWS_AS(generate_completion_instance(5, 2, 0.0, 1), DomainError);
}

TEST_CASE("completion with zero observations values") {
  InteriorPointBackend be;
  CompletionInstance inst = generate_completion_instance(6, 2, 0.5, 3);
  for (auto& o : inst.observations) o.value = 0.0;
  const SolveResult r = complete(inst, be, completion_default_config());
  CHECK(r.status == EngineStatus::converged);
  CHECK(r.x.frobenius_norm() < 1e-6);
  CHECK(r.final_bound == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("completion certificate and feasibility") {
  InteriorPointBackend be;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const CompletionInstance inst = generate_completion_instance(12, 2, 0.5, seed);
    const SolveResult r = complete(inst, be, completion_default_config());
    REQUIRE(r.status == EngineStatus::converged);
    CHECK(max_observation_error(inst, r.x) < 1e-8);
    for (const auto& rec : r.trace) {
      REQUIRE(rec.upper_bound.has_value());
      CHECK(*rec.upper_bound - rec.bound >= -1e-8);
    }
    const auto& last = r.trace.back();
    CHECK(*last.upper_bound - last.bound <= 1e-3 * std::abs(*last.upper_bound) + 1e-12);
  }
}

TEST_CASE("small completion matches the splitting reference") {
  InteriorPointBackend be;
  const CompletionInstance inst = generate_completion_instance(10, 2, 0.5, 10);
  const SolveResult r = complete(inst, be, completion_default_config());
  REQUIRE(r.status == EngineStatus::converged);
  const ref::CompletionReference rf = ref::admm_completion(inst.n, obs_of(inst), 1.0 / inst.gamma);
  const double ours = completion_objective(r.x, inst.gamma);
  CHECK(std::abs(ours - rf.objective) <= 5e-3 * rf.objective);
}

TEST_CASE("theta approaches the plain nuclear-norm optimum as gamma grows") {
  InteriorPointBackend be;
  const CompletionInstance base = generate_completion_instance(8, 1, 0.6, 21);
  const double target = ref::admm_completion(base.n, obs_of(base), 0.0, 1.0, 50000, 1e-11).nuclear;
  double last_err = 1e300;
  for (double mult : {1.0, 10.0, 100.0}) {
    CompletionInstance inst = base;
    inst.gamma = mult * base.n;
    EngineConfig cfg = completion_default_config();
    cfg.max_iterations = 5000;
    const SolveResult r = complete(inst, be, cfg, 1e-5);
    REQUIRE(r.status == EngineStatus::converged);
    const double err = std::abs(*r.theta - target);
    CHECK(*r.theta >= target - 1e-4 * target);
    CHECK(err <= last_err + 1e-6);
    last_err = err;
  }
  CHECK(last_err <= 2e-2 * target);
}

TEST_CASE("completion JSON round trip") {
  const CompletionInstance a = generate_completion_instance(9, 2, 0.5, 6);
  const CompletionInstance b = completion_from_json(nlohmann::json::parse(to_json(a).dump()));
  CHECK(b.n == a.n);
  CHECK(b.gamma == a.gamma);
  CHECK(b.observations == a.observations);
  nlohmann::json j = {{"n", 3}, {"observations", {{1, 0, 0.5}, {2, 2, 1.0}}}};
  const CompletionInstance c = completion_from_json(j);
  CHECK(c.gamma == doctest::Approx(1.0 / 3));
  CHECK(c.observations[0].i == 0);
  CHECK(c.observations[0].j == 1);
  j["observations"].push_back({0, 1, 0.25});
  CHECK_THROWS_AS(completion_from_json(j), DomainError);
  CHECK_THROWS_AS(completion_from_json(nlohmann::json{{"n", 2}}), ParseError);
}
