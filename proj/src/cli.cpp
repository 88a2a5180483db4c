#include "sdpcut/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "sdpcut/bench.hpp"
#include "sdpcut/completion.hpp"
#include "sdpcut/errors.hpp"
#include "sdpcut/ipm.hpp"
#include "sdpcut/matrix_market.hpp"
#include "sdpcut/relax.hpp"
#include "sdpcut/sdpa.hpp"
#include "sdpcut/serialization.hpp"
#include "sdpcut/spca.hpp"

namespace sdpcut {

int exit_code_for(EngineStatus status) {
  switch (status) {
    case EngineStatus::converged:
      return kExitConverged;
    case EngineStatus::iteration_limit:
      return kExitIterationLimit;
    case EngineStatus::backend_failure:
      return kExitBackendFailure;
  }
  return kExitBackendFailure;
}

namespace {

using nlohmann::json;

json trace_json(const std::vector<IterationRecord>& trace) {
  json arr = json::array();
  for (const auto& r : trace) {
    json j{{"iteration", r.t},          {"bound", r.bound},     {"violation", r.violation},
           {"cuts_total", r.cuts_total}, {"seconds", r.seconds}};
    j["upper_bound"] = r.upper_bound ? json(*r.upper_bound) : json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

json engine_json(const SolveResult& r) {
  json j;
  j["status"] = to_string(r.status);
  j["termination"] = r.termination;
  j["stalled"] = r.stalled;
  j["bound"] = r.final_bound;
  j["violation"] = r.final_violation;
  j["iterations"] = static_cast<int>(r.trace.size());
  j["cuts_total"] = r.trace.empty() ? 0 : r.trace.back().cuts_total;
  j["lipschitz"] = r.lipschitz;
  j["log_iteration_bound"] = r.log_iteration_bound;
  j["theta"] = r.theta ? json(*r.theta) : json(nullptr);
  j["x"] = to_json(r.x);
  j["trace"] = trace_json(r.trace);
  return j;
}

void maybe_write_json(const std::string& path, const json& j) {
  if (!path.empty()) write_json_file(path, j);
}

void maybe_write_trace(const std::string& path, const std::vector<IterationRecord>& trace) {
  if (!path.empty()) write_trace_csv_file(path, trace);
}

struct SolveSdpArgs {
  std::string input;
  bool maximize = false;
  std::string relaxation = "soc";
  std::string cuts = "eig";
  double eps = 1e-6;
  std::optional<double> trace_bound;
  int max_iters = 2000;
  int max_cuts = 10;
  std::optional<double> time_limit;
  std::string out;
  std::string trace;
};

int cmd_solve_sdp(const SolveSdpArgs& a) {
  SDPInstance inst = parse_sdpa_file(a.input, a.maximize);
  const bool had_row = extract_trace_row(inst);
  if (had_row) {
    if (a.trace_bound) std::cerr << "note: the instance has a trace row; --trace-bound is ignored\n";
  } else {
    if (!a.trace_bound) {
      throw DomainError("the instance has no trace row; pass --trace-bound T to bound tr(X) <= T");
    }
    inst.trace_bound = *a.trace_bound;
    inst.trace_mode = TraceMode::inequality;
  }
  const RelaxationKind kind = a.relaxation == "lp" ? RelaxationKind::lp_minor : RelaxationKind::soc_minor;
  EngineConfig cfg;
  cfg.eps = a.eps;
  cfg.max_iterations = a.max_iters;
  cfg.max_cuts_per_iter = a.max_cuts;
  cfg.cuts = a.cuts == "nuclear" ? CutMode::nuclear_membership : CutMode::eig;

  InteriorPointBackend backend;
  EngineHooks hooks;
  if (a.time_limit) {
    const double limit = *a.time_limit;
    hooks.stop = [limit](const IterationRecord& r) -> std::optional<StopDecision> {
      if (r.seconds > limit) return StopDecision{EngineStatus::iteration_limit, "time_limit"};
      return std::nullopt;
    };
  }
  const SolveResult res = solve(build_relaxation(inst, kind), backend, cfg, hooks);
  json j = engine_json(res);
  j["format_version"] = kFormatVersion;
  j["kind"] = "solve_sdp_result";
  j["input"] = a.input;
  j["n"] = inst.order;
  j["relaxation"] = to_string(kind);
  j["cut_mode"] = to_string(cfg.cuts);
  j["eps"] = cfg.eps;
  j["trace_bound"] = *inst.trace_bound;
  j["trace_mode"] = inst.trace_mode == TraceMode::equality ? "equality" : "inequality";
  maybe_write_json(a.out, j);
  maybe_write_trace(a.trace, res.trace);
  std::cout << "status " << to_string(res.status) << " (" << res.termination << ")  bound "
            << std::setprecision(10) << res.final_bound << "  violation " << res.final_violation << "  iterations "
            << res.trace.size() << "\n";
  return exit_code_for(res.status);
}

struct SpcaArgs {
  std::string sigma;
  int k = 0;
  std::string mode = "auto";
  int aggregate_above = 1000;
  std::vector<int> checkpoints{0, 5, 20};
  double eps = 1e-6;
  int max_iters = 2000;
  std::string out;
  std::string trace;
};

int cmd_spca(const SpcaArgs& a) {
  SpcaInstance inst;
  inst.sigma = read_matrix_market_file(a.sigma);
  inst.k = a.k;
  inst.validate();
  SpcaMode mode = SpcaMode::full;
  if (a.mode == "aggregated" || (a.mode == "auto" && inst.sigma.order() > a.aggregate_above)) {
    mode = SpcaMode::aggregated;
  }
  EngineConfig cfg = spca_default_config();
  cfg.eps = a.eps;
  cfg.max_iterations = a.max_iters;
  InteriorPointBackend backend;
  const SpcaBoundResult res = spca_upper_bound(inst, backend, cfg, a.checkpoints, mode);

  json cps = json::array();
  for (const auto& c : res.checkpoints) {
    cps.push_back({{"cuts", c.cuts}, {"upper_bound", c.upper_bound}, {"gap_percent", c.gap_percent},
                   {"seconds", c.seconds}});
  }
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "spca_bound_result";
  j["sigma"] = a.sigma;
  j["n"] = inst.sigma.order();
  j["k"] = inst.k;
  j["mode"] = mode == SpcaMode::full ? "full" : "aggregated";
  j["status"] = to_string(res.engine_status);
  j["termination"] = res.termination;
  j["checkpoints"] = cps;
  j["lower_bound"] = {{"value", res.lower_bound.value},
                      {"support", res.lower_bound.support},
                      {"method", res.lower_bound.method}};
  j["trace"] = trace_json(res.trace);
  j["seconds"] = res.seconds;
  maybe_write_json(a.out, j);
  maybe_write_trace(a.trace, res.trace);
  std::cout << "lower bound " << std::setprecision(10) << res.lower_bound.value << " (" << res.lower_bound.method
            << ")\n";
  for (const auto& c : res.checkpoints) {
    std::cout << "cuts " << c.cuts << "  upper bound " << std::setprecision(10) << c.upper_bound << "  gap "
              << std::setprecision(4) << c.gap_percent << "%\n";
  }
  return exit_code_for(res.engine_status);
}

struct CompleteArgs {
  std::string instance;
  std::string generate;
  std::optional<double> gamma;
  double gap_tol = 1e-3;
  double eps = 1e-6;
  int max_iters = 2000;
  std::string save_instance;
  std::string out;
  std::string trace;
};

CompletionInstance generated_instance(const std::string& spec) {
  std::string s = spec;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  int n = 0, rank = 0;
  double frac = 0.0;
  unsigned long long seed = 0;
  std::string extra;
  if (!(in >> n >> rank >> frac >> seed) || (in >> extra)) {
    throw DomainError("--generate expects n,rank,fraction,seed; got '" + spec + "'");
  }
  return generate_completion_instance(n, rank, frac, seed);
}

int cmd_complete(const CompleteArgs& a) {
  if (a.instance.empty() == a.generate.empty()) throw DomainError("pass exactly one of --instance or --generate");
  CompletionInstance inst =
      a.instance.empty() ? generated_instance(a.generate) : completion_from_json(read_json_file(a.instance));
  if (a.gamma) inst.gamma = *a.gamma;
  inst.validate();
  if (!a.save_instance.empty()) write_json_file(a.save_instance, to_json(inst));
  EngineConfig cfg = completion_default_config();
  cfg.eps = a.eps;
  cfg.max_iterations = a.max_iters;
  InteriorPointBackend backend;
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult res = complete(inst, backend, cfg, a.gap_tol);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const IterationRecord& last = res.trace.back();
  const double ub = last.upper_bound.value_or(last.bound);
  json j = engine_json(res);
  j["format_version"] = kFormatVersion;
  j["kind"] = "completion_result";
  j["n"] = inst.n;
  j["gamma"] = inst.gamma;
  j["observations"] = inst.observations.size();
  j["lower_bound"] = last.bound;
  j["upper_bound"] = ub;
  j["gap_percent"] = 100.0 * (ub - last.bound) / std::abs(ub);
  j["objective"] = completion_objective(res.x, inst.gamma);
  j["max_observation_error"] = max_observation_error(inst, res.x);
  j["seconds"] = secs;
  if (!a.generate.empty()) j["generate"] = a.generate;
  maybe_write_json(a.out, j);
  maybe_write_trace(a.trace, res.trace);
  std::cout << "status " << to_string(res.status) << " (" << res.termination << ")  lower " << std::setprecision(10)
            << last.bound << "  upper " << ub << "  gap " << std::setprecision(4)
            << 100.0 * (ub - last.bound) / std::abs(ub) << "%  iterations " << res.trace.size() << "\n";
  return exit_code_for(res.status);
}

struct BenchArgs {
  std::string suite;
  std::string out;
  std::string sigma;
};

int cmd_bench(const BenchArgs& a) {
  BenchOptions opt;
  opt.pitprops_path = a.sigma;
  InteriorPointBackend backend;
  const BenchReport rep = run_bench_suite(a.suite, backend, opt);
  if (!a.out.empty()) rep.write_csv_file(a.out);
  rep.write_table(std::cout);
  return kExitConverged;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Cutting-plane bounds for semidefinite programs over SOC outer approximations", "sdpcut"};
  app.require_subcommand(1);

  SolveSdpArgs sa;
  double sa_trace = 0.0;
  auto* solve_cmd = app.add_subcommand("solve-sdp", "Solve an SDPA instance by outer approximation");
  solve_cmd->add_option("--input", sa.input, "SDPA sparse file (.dat-s)")->required()->check(CLI::ExistingFile);
  solve_cmd->add_flag("--maximize", sa.maximize, "Read matrix 0 as a maximization objective");
  solve_cmd->add_option("--relaxation", sa.relaxation, "Initial relaxation")
      ->check(CLI::IsMember({"lp", "soc"}))
      ->capture_default_str();
  solve_cmd->add_option("--cuts", sa.cuts, "Cut family")->check(CLI::IsMember({"eig", "nuclear"}))->capture_default_str();
  solve_cmd->add_option("--eps", sa.eps, "Feasibility tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  auto* tb = solve_cmd->add_option("--trace-bound", sa_trace, "tr(X) <= T when the instance has no trace row")
                 ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", sa.max_iters, "Iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
  solve_cmd->add_option("--max-cuts", sa.max_cuts, "Cuts added per iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  double sa_time = 0.0;
  auto* tl = solve_cmd->add_option("--time-limit", sa_time, "Stop after this many seconds (exit code 2)")
                 ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", sa.out, "Result JSON");
  solve_cmd->add_option("--trace", sa.trace, "Iteration trace CSV");

  SpcaArgs pa;
  auto* spca_cmd = app.add_subcommand("spca-bound", "Sparse PCA upper bounds at cut checkpoints");
  spca_cmd->add_option("--sigma", pa.sigma, "Covariance matrix (Matrix Market)")->required()->check(CLI::ExistingFile);
  spca_cmd->add_option("--k", pa.k, "Sparsity budget")->required()->check(CLI::PositiveNumber);
  spca_cmd->add_option("--mode", pa.mode, "Relaxation")
      ->check(CLI::IsMember({"auto", "full", "aggregated"}))
      ->capture_default_str();
  spca_cmd->add_option("--aggregate-above", pa.aggregate_above, "auto mode aggregates when n exceeds this")
      ->capture_default_str();
  spca_cmd->add_option("--checkpoints", pa.checkpoints, "Ascending cut counts")->delimiter(',')->capture_default_str();
  spca_cmd->add_option("--eps", pa.eps, "Feasibility tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  spca_cmd->add_option("--max-iters", pa.max_iters, "Iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
  spca_cmd->add_option("--out", pa.out, "Result JSON");
  spca_cmd->add_option("--trace", pa.trace, "Iteration trace CSV");

  CompleteArgs ca;
  double ca_gamma = 0.0;
  auto* comp_cmd = app.add_subcommand("complete", "Nuclear-norm matrix completion with a ridge term");
  comp_cmd->add_option("--instance", ca.instance, "Completion instance JSON")->check(CLI::ExistingFile);
  comp_cmd->add_option("--generate", ca.generate, "Random instance n,rank,fraction,seed");
  auto* gm = comp_cmd->add_option("--gamma", ca_gamma, "Ridge parameter (default from the instance)")
                 ->check(CLI::PositiveNumber);
  comp_cmd->add_option("--gap-tol", ca.gap_tol, "Relative gap for termination")->capture_default_str();
  comp_cmd->add_option("--eps", ca.eps, "Feasibility tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  comp_cmd->add_option("--max-iters", ca.max_iters, "Iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
  comp_cmd->add_option("--save-instance", ca.save_instance, "Write the instance JSON");
  comp_cmd->add_option("--out", ca.out, "Result JSON");
  comp_cmd->add_option("--trace", ca.trace, "Iteration trace CSV");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark suites");
  bench_cmd->add_option("--suite", ba.suite, "Suite")
      ->required()
      ->check(CLI::IsMember({"spca-pitprops", "completion-scaling"}));
  bench_cmd->add_option("--out", ba.out, "Report CSV");
  bench_cmd->add_option("--sigma", ba.sigma, "Pitprops matrix (default: bundled)")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (*solve_cmd) {
      if (*tb) sa.trace_bound = sa_trace;
      if (*tl) sa.time_limit = sa_time;
      return cmd_solve_sdp(sa);
    }
    if (*spca_cmd) return cmd_spca(pa);
    if (*comp_cmd) {
      if (*gm) ca.gamma = ca_gamma;
      return cmd_complete(ca);
    }
    if (*bench_cmd) return cmd_bench(ba);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnsupportedError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NumericalError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackendFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackendFailure;
  }
  return kExitInputError;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sdpcut");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sdpcut
