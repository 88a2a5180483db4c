#include "sdpcut/sdpa.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <vector>

#include "sdpcut/errors.hpp"

namespace sdpcut {

namespace {

// Tokenizer over data lines; comment lines start with '"' or '*'.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next data line as tokens; false at EOF.
  bool next_line(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '"' || line[first] == '*') continue;
      for (char& c : line) {
        if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
      }
      std::istringstream ss(line);
      tokens.clear();
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (tokens.empty()) continue;
      return true;
    }
    return false;
  }

  // `count` tokens, possibly spread over several lines.
  std::vector<std::string> take(std::size_t count, const char* what) {
    while (pending_.size() < count) {
      std::vector<std::string> t;
      if (!next_line(t)) throw ParseError(std::string("unexpected end of file while reading ") + what, lineno_);
      // header lines may carry trailing remarks such as "2 =mDIM"
      std::size_t keep = 0;
      while (keep < t.size() && numeric(t[keep])) ++keep;
      if (keep == 0) throw ParseError(std::string("expected a number while reading ") + what + ", got '" + t[0] + "'", lineno_);
      pending_.insert(pending_.end(), t.begin(), t.begin() + static_cast<long>(keep));
    }
    std::vector<std::string> out(pending_.begin(), pending_.begin() + static_cast<long>(count));
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<long>(count));
    return out;
  }

  static bool numeric(const std::string& tok) {
    char* end = nullptr;
    std::strtod(tok.c_str(), &end);
    return end != tok.c_str() && *end == '\0';
  }

  bool has_pending() const { return !pending_.empty(); }
  int line() const { return lineno_; }

 private:
  std::istream& in_;
  int lineno_ = 0;
  std::vector<std::string> pending_;
};

long to_int(const std::string& s, int line, const char* what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected an integer for ") + what + ", got '" + s + "'", line);
  }
  if (pos != s.size()) throw ParseError(std::string("expected an integer for ") + what + ", got '" + s + "'", line);
  return v;
}

double to_double(const std::string& s, int line, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected a number for ") + what + ", got '" + s + "'", line);
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw ParseError(std::string("expected a finite number for ") + what + ", got '" + s + "'", line);
  }
  return v;
}

}  // namespace

SDPInstance parse_sdpa(std::istream& in, bool maximize) {
  Reader r(in);
  const long m = to_int(r.take(1, "the constraint count").front(), r.line(), "the constraint count");
  if (m < 0) throw ParseError("negative constraint count", r.line());
  const long nblocks = to_int(r.take(1, "the block count").front(), r.line(), "the block count");
  if (nblocks < 1) throw ParseError("block count must be positive", r.line());
  std::vector<long> sizes;
  for (const auto& t : r.take(static_cast<std::size_t>(nblocks), "block sizes")) {
    const long s = to_int(t, r.line(), "a block size");
    if (s == 0) throw ParseError("block size 0", r.line());
    sizes.push_back(s);
  }
  bool all_diag = true;
  for (long s : sizes) all_diag = all_diag && s < 0;
  if (nblocks > 1 && !all_diag) {
    throw UnsupportedError("multi-block SDPA instances are supported only when every block is diagonal");
  }
  std::vector<long> offset;
  long order = 0;
  for (long s : sizes) {
    offset.push_back(order);
    order += std::abs(s);
  }

  SDPInstance inst;
  inst.order = static_cast<int>(order);
  inst.sense = maximize ? ObjectiveSense::maximize : ObjectiveSense::minimize;
  inst.objective = SymMat(inst.order);
  std::vector<double> b;
  for (const auto& t : r.take(static_cast<std::size_t>(m), "the right-hand side vector")) {
    b.push_back(to_double(t, r.line(), "a right-hand side entry"));
  }
  if (r.has_pending()) throw ParseError("extra tokens after the right-hand side vector", r.line());
  for (long k = 0; k < m; ++k) inst.equalities.push_back({SymMat(inst.order), b[static_cast<std::size_t>(k)]});

  std::set<std::tuple<long, long, long, long>> seen;
  std::vector<std::string> tok;
  while (r.next_line(tok)) {
    const int line = r.line();
    if (tok.size() != 5) throw ParseError("expected 'matno blkno i j value', found " + std::to_string(tok.size()) + " fields", line);
    const long mat = to_int(tok[0], line, "matno");
    const long blk = to_int(tok[1], line, "blkno");
    long i = to_int(tok[2], line, "i");
    long j = to_int(tok[3], line, "j");
    const double v = to_double(tok[4], line, "value");
    if (mat < 0 || mat > m) throw ParseError("matno " + std::to_string(mat) + " out of range 0.." + std::to_string(m), line);
    if (blk < 1 || blk > nblocks) throw ParseError("blkno " + std::to_string(blk) + " out of range", line);
    const long bs = std::abs(sizes[static_cast<std::size_t>(blk - 1)]);
    if (i < 1 || j < 1 || i > bs || j > bs) throw ParseError("entry index outside its block", line);
    if (sizes[static_cast<std::size_t>(blk - 1)] < 0 && i != j) {
      throw ParseError("off-diagonal entry in a diagonal block", line);
    }
    if (i > j) std::swap(i, j);
    if (!seen.emplace(mat, blk, i, j).second) throw ParseError("duplicate entry", line);
    const long off = offset[static_cast<std::size_t>(blk - 1)];
    SymMat& target = mat == 0 ? inst.objective : inst.equalities[static_cast<std::size_t>(mat - 1)].matrix;
    target.set(static_cast<int>(off + i - 1), static_cast<int>(off + j - 1), v);
  }
  inst.validate();
  return inst;
}

SDPInstance parse_sdpa_file(const std::string& path, bool maximize) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_sdpa(in, maximize);
}

void write_sdpa(std::ostream& out, const SDPInstance& instance) {
  instance.validate();
  out << "\"written by sdpcut; objective sense: "
      << (instance.sense == ObjectiveSense::maximize ? "maximize" : "minimize") << "\n";
  if (instance.trace_bound) {
    out << "* trace bound " << std::setprecision(17) << *instance.trace_bound
        << (instance.trace_mode == TraceMode::equality ? " (equality)" : " (inequality)") << "\n";
  }
  out << instance.equalities.size() << "\n1\n" << instance.order << "\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < instance.equalities.size(); ++k) {
    out << (k ? " " : "") << instance.equalities[k].rhs;
  }
  out << "\n";
  auto emit = [&](std::size_t mat, const SymMat& m) {
    for (int j = 0; j < m.order(); ++j) {
      for (int i = 0; i <= j; ++i) {
        if (m(i, j) != 0.0) out << mat << " 1 " << (i + 1) << ' ' << (j + 1) << ' ' << m(i, j) << "\n";
      }
    }
  };
  emit(0, instance.objective);
  for (std::size_t k = 0; k < instance.equalities.size(); ++k) emit(k + 1, instance.equalities[k].matrix);
}

void write_sdpa_file(const std::string& path, const SDPInstance& instance) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_sdpa(out, instance);
}

bool extract_trace_row(SDPInstance& instance, double tol) {
  for (std::size_t k = 0; k < instance.equalities.size(); ++k) {
    const SymMat& a = instance.equalities[k].matrix;
    const double alpha = a(0, 0);
    if (!(alpha > 0.0)) continue;
    bool ok = true;
    for (int j = 0; j < a.order() && ok; ++j) {
      for (int i = 0; i <= j && ok; ++i) {
        const double want = i == j ? alpha : 0.0;
        ok = std::abs(a(i, j) - want) <= tol * alpha;
      }
    }
    if (!ok) continue;
    const double t = instance.equalities[k].rhs / alpha;
    if (!(t > 0.0)) continue;
    instance.trace_bound = t;
    instance.trace_mode = TraceMode::equality;
    instance.equalities.erase(instance.equalities.begin() + static_cast<long>(k));
    return true;
  }
  return false;
}

}  // namespace sdpcut
