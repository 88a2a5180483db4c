#include "sdpcut/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sdpcut/completion.hpp"
#include "sdpcut/errors.hpp"
#include "sdpcut/matrix_market.hpp"
#include "sdpcut/spca.hpp"

namespace sdpcut {

double bench_gap_percent(double bound, double baseline) {
  return 100.0 * std::abs(bound - baseline) / std::abs(baseline);
}

std::string bundled_pitprops_path() { return std::string(SDPCUT_DATA_DIR) + "/pitprops.mtx"; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

BenchRow make_row(std::string instance, int n, std::string pname, int param, std::string method, double bound,
                  double baseline, int cuts, double seconds, std::string reproduce) {
  BenchRow r;
  r.instance = std::move(instance);
  r.n = n;
  r.param_name = std::move(pname);
  r.param = param;
  r.method = std::move(method);
  r.bound = bound;
  r.baseline = baseline;
  r.gap_percent = bench_gap_percent(bound, baseline);
  r.cuts = cuts;
  r.seconds = seconds;
  r.reproduce = std::move(reproduce);
  return r;
}

}  // namespace

void BenchReport::write_csv(std::ostream& out) const {
  out << "instance,n,param_name,param,method,bound,baseline,gap_percent,cuts,seconds,reproduce\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << csv_field(r.instance) << ',' << r.n << ',' << r.param_name << ',' << r.param << ','
        << csv_field(r.method) << ',' << r.bound << ',' << r.baseline << ',' << r.gap_percent << ',' << r.cuts
        << ',' << r.seconds << ',' << csv_field(r.reproduce) << '\n';
  }
}

void BenchReport::write_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out);
}

void BenchReport::write_table(std::ostream& out) const {
  out << "suite: " << suite << "\n";
  out << std::left << std::setw(14) << "instance" << std::right << std::setw(5) << "n" << std::setw(9) << "param"
      << "  " << std::left << std::setw(18) << "method" << std::right << std::setw(14) << "bound"
      << std::setw(14) << "baseline" << std::setw(10) << "gap (%)" << std::setw(6) << "cuts" << std::setw(11)
      << "runtime (s)" << "\n";
  for (const auto& r : rows) {
    std::ostringstream param;
    param << r.param_name << '=' << r.param;
    out << std::left << std::setw(14) << r.instance << std::right << std::setw(5) << r.n << std::setw(9)
        << param.str() << "  " << std::left << std::setw(18) << r.method << std::right << std::fixed
        << std::setprecision(6) << std::setw(14) << r.bound << std::setw(14) << r.baseline << std::setprecision(2)
        << std::setw(10) << r.gap_percent << std::setw(6) << r.cuts << std::setprecision(3) << std::setw(11)
        << r.seconds << "\n";
    out.unsetf(std::ios::fixed);
  }
}

BenchReport bench_spca_pitprops(const SolverBackend& backend, const BenchOptions& options) {
  const std::string path = options.pitprops_path.empty() ? bundled_pitprops_path() : options.pitprops_path;
  SpcaInstance inst;
  inst.sigma = read_matrix_market_file(path);
  inst.k = 10;
  const int n = inst.sigma.order();
  const std::string base = "spca-bound --sigma " + path + " --k 10";

  BenchReport rep;
  rep.suite = "spca-pitprops";
  const SpcaBoundResult res = spca_upper_bound(inst, backend, spca_default_config(), {0, 5, 20}, SpcaMode::full);
  const double lb = res.lower_bound.value;
  for (const auto& cp : res.checkpoints) {
    const std::string label = cp.cuts == 0 ? "soc" : "soc+" + std::to_string(cp.cuts) + "cuts";
    rep.rows.push_back(make_row("pitprops", n, "k", 10, label, cp.upper_bound, lb, cp.cuts, cp.seconds,
                                base + " --checkpoints " + std::to_string(cp.cuts)));
  }

  // Cutting until the iterate is eps-feasible approximates the SDO bound.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult full = solve(spca_relaxation(inst, SpcaMode::full), backend, spca_default_config());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (full.status == EngineStatus::backend_failure) throw NumericalError("pitprops run failed: " + full.termination);
    const int cuts = full.trace.back().cuts_total;
    rep.rows.push_back(make_row("pitprops", n, "k", 10, "soc+cuts_to_eps", full.final_bound, lb, cuts, secs,
                                base + " --checkpoints " + std::to_string(cuts)));
  }
  {
    const SpcaBoundResult agg =
        spca_upper_bound(inst, backend, spca_default_config(), {0}, SpcaMode::aggregated);
    rep.rows.push_back(make_row("pitprops", n, "k", 10, "soc_aggregated", agg.checkpoints[0].upper_bound, lb, 0,
                                agg.checkpoints[0].seconds, base + " --mode aggregated --checkpoints 0"));
  }
  return rep;
}

BenchReport bench_completion_scaling(const SolverBackend& backend, const BenchOptions& options) {
  BenchReport rep;
  rep.suite = "completion-scaling";
  for (int n : options.completion_sizes) {
    const CompletionInstance inst =
        generate_completion_instance(n, options.completion_rank, options.completion_fraction, options.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult res = complete(inst, backend, completion_default_config());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (res.status == EngineStatus::backend_failure) {
      throw NumericalError("completion n = " + std::to_string(n) + " failed: " + res.termination);
    }
    const IterationRecord& last = res.trace.back();
    std::ostringstream gen;
    gen << std::setprecision(17) << "complete --generate " << n << ',' << options.completion_rank << ','
        << options.completion_fraction << ',' << options.seed;
    rep.rows.push_back(make_row("completion_" + std::to_string(n), n, "rank", options.completion_rank,
                                "nuclear_epigraph", last.bound, last.upper_bound.value_or(last.bound),
                                last.cuts_total, secs, gen.str()));
  }
  return rep;
}

BenchReport run_bench_suite(const std::string& suite, const SolverBackend& backend, const BenchOptions& options) {
  if (suite == "spca-pitprops") return bench_spca_pitprops(backend, options);
  if (suite == "completion-scaling") return bench_completion_scaling(backend, options);
  throw DomainError("unknown bench suite '" + suite + "'");
}

}  // namespace sdpcut
