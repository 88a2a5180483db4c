#include "sdpcut/serialization.hpp"

#include <fstream>

#include "sdpcut/errors.hpp"

namespace sdpcut {

using nlohmann::json;

namespace {

json terms_json(const std::vector<Term>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({t.var, t.coef});
  return out;
}

std::vector<Term> terms_from(const json& j) {
  std::vector<Term> out;
  for (const auto& t : j) out.push_back({t.at(0).get<int>(), t.at(1).get<double>()});
  return out;
}

json affine_json(const AffineExpr& e) { return {{"terms", terms_json(e.terms)}, {"constant", e.constant}}; }

AffineExpr affine_from(const json& j) { return {terms_from(j.at("terms")), j.at("constant").get<double>()}; }

const char* sense_name(RowSense s) {
  switch (s) {
    case RowSense::equal:
      return "eq";
    case RowSense::less_equal:
      return "le";
    case RowSense::greater_equal:
      return "ge";
  }
  return "eq";
}

RowSense sense_from(const std::string& s) {
  if (s == "eq") return RowSense::equal;
  if (s == "le") return RowSense::less_equal;
  if (s == "ge") return RowSense::greater_equal;
  throw ParseError("unknown row sense '" + s + "'", 0);
}

json cut_json(const LinearCut& c) {
  json j = {{"theta_coef", c.theta_coef},
            {"rhs", c.rhs},
            {"family", c.family == CutFamily::eig ? "eig" : "nuclear"},
            {"birth", c.birth}};
  if (const auto* d = std::get_if<SymMat>(&c.matrix)) {
    j["dense"] = to_json(*d);
  } else {
    const auto& lr = std::get<LowRankMatrix>(c.matrix);
    json terms = json::array();
    for (const auto& t : lr.terms) {
      terms.push_back({{"sign", t.sign}, {"vec", std::vector<double>(t.vec.data(), t.vec.data() + t.vec.size())}});
    }
    j["low_rank"] = {{"scale", lr.scale}, {"terms", terms}};
  }
  return j;
}

LinearCut cut_from(const json& j) {
  LinearCut c;
  c.theta_coef = j.at("theta_coef").get<double>();
  c.rhs = j.at("rhs").get<double>();
  c.family = j.at("family").get<std::string>() == "eig" ? CutFamily::eig : CutFamily::nuclear;
  c.birth = j.at("birth").get<int>();
  if (j.contains("dense")) {
    c.matrix = symmat_from_json(j.at("dense"));
  } else {
    LowRankMatrix lr;
    lr.scale = j.at("low_rank").at("scale").get<double>();
    for (const auto& t : j.at("low_rank").at("terms")) {
      const auto v = t.at("vec").get<std::vector<double>>();
      lr.terms.push_back({t.at("sign").get<double>(), Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()))});
    }
    c.matrix = std::move(lr);
  }
  return c;
}

}  // namespace

void check_format(const json& j, const std::string& kind) {
  if (!j.is_object() || !j.contains("format_version")) throw ParseError("missing format_version", 0);
  const int v = j.at("format_version").get<int>();
  if (v < 1 || v > kFormatVersion) throw ParseError("unsupported format_version " + std::to_string(v), 0);
  if (j.value("kind", std::string()) != kind) throw ParseError("expected a '" + kind + "' document", 0);
}

json to_json(const SymMat& m) { return {{"order", m.order()}, {"packed", m.packed()}}; }

SymMat symmat_from_json(const json& j) {
  const int n = j.at("order").get<int>();
  auto packed = j.at("packed").get<std::vector<double>>();
  if (packed.size() != packed_size(n)) throw ParseError("packed matrix has the wrong length", 0);
  return SymMat(n, std::move(packed));
}

json to_json(const ConicProgram& p) {
  json rows = json::array();
  for (const auto& r : p.rows) rows.push_back({{"terms", terms_json(r.terms)}, {"sense", sense_name(r.sense)}, {"rhs", r.rhs}});
  json cones = json::array();
  for (const auto& c : p.cones) {
    json entries = json::array();
    for (const auto& e : c.entries) entries.push_back(affine_json(e));
    cones.push_back({{"bound", affine_json(c.bound)}, {"entries", entries}});
  }
  json cuts = json::array();
  for (const auto& c : p.cuts) cuts.push_back(cut_json(c));
  return {{"format_version", kFormatVersion},
          {"kind", "conic_program"},
          {"order", p.order},
          {"aux_names", p.aux_names},
          {"cost", p.cost},
          {"cost_constant", p.cost_constant},
          {"sense", p.reported_sense == ObjectiveSense::maximize ? "maximize" : "minimize"},
          {"rows", rows},
          {"cones", cones},
          {"cuts", cuts},
          {"theta", p.theta ? json(*p.theta) : json(nullptr)},
          {"trace_bound", p.trace_bound ? json(*p.trace_bound) : json(nullptr)}};
}

ConicProgram program_from_json(const json& j) {
  check_format(j, "conic_program");
  ConicProgram p(j.at("order").get<int>());
  p.aux_names = j.at("aux_names").get<std::vector<std::string>>();
  p.cost = j.at("cost").get<std::vector<double>>();
  p.cost_constant = j.at("cost_constant").get<double>();
  p.reported_sense = j.at("sense").get<std::string>() == "maximize" ? ObjectiveSense::maximize : ObjectiveSense::minimize;
  for (const auto& r : j.at("rows")) {
    p.rows.push_back({terms_from(r.at("terms")), sense_from(r.at("sense").get<std::string>()), r.at("rhs").get<double>()});
  }
  for (const auto& c : j.at("cones")) {
    SocBlock b;
    b.bound = affine_from(c.at("bound"));
    for (const auto& e : c.at("entries")) b.entries.push_back(affine_from(e));
    p.cones.push_back(std::move(b));
  }
  for (const auto& c : j.at("cuts")) p.cuts.push_back(cut_from(c));
  if (!j.at("theta").is_null()) p.theta = j.at("theta").get<int>();
  if (!j.at("trace_bound").is_null()) p.trace_bound = j.at("trace_bound").get<double>();
  p.validate();
  return p;
}

json to_json(const BackendSolution& s) {
  return {{"format_version", kFormatVersion},
          {"kind", "backend_solution"},
          {"status", to_string(s.status)},
          {"matrix", to_json(s.matrix)},
          {"values", s.values},
          {"theta", s.theta ? json(*s.theta) : json(nullptr)},
          {"objective", s.objective},
          {"iterations", s.iterations},
          {"backend_status", s.backend_status}};
}

BackendSolution solution_from_json(const json& j) {
  check_format(j, "backend_solution");
  BackendSolution s;
  const auto st = j.at("status").get<std::string>();
  if (st == "optimal") {
    s.status = SolveStatus::optimal;
  } else if (st == "infeasible") {
    s.status = SolveStatus::infeasible;
  } else if (st == "unbounded") {
    s.status = SolveStatus::unbounded;
  } else {
    s.status = SolveStatus::numerical_trouble;
  }
  s.matrix = symmat_from_json(j.at("matrix"));
  s.values = j.at("values").get<std::vector<double>>();
  if (!j.at("theta").is_null()) s.theta = j.at("theta").get<double>();
  s.objective = j.at("objective").get<double>();
  s.iterations = j.at("iterations").get<int>();
  s.backend_status = j.at("backend_status").get<std::string>();
  return s;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what(), 0);
  }
}

}  // namespace sdpcut
