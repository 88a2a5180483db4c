#pragma once

#include <string>

#include <json.hpp>

#include "sdpcut/model.hpp"

namespace sdpcut {

inline constexpr int kFormatVersion = 1;

/// JSON forms carry "format_version" and "kind". Doubles are written with
/// round-trip precision, so reloading reproduces every coefficient bit-exactly.
nlohmann::json to_json(const ConicProgram& program);
ConicProgram program_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BackendSolution& solution);
BackendSolution solution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SymMat& m);
SymMat symmat_from_json(const nlohmann::json& j);

/// Throws ParseError for a missing or newer format_version, or a wrong kind.
void check_format(const nlohmann::json& j, const std::string& kind);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace sdpcut
