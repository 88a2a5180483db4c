#pragma once

#include <iosfwd>
#include <string>

#include "sdpcut/symla.hpp"

namespace sdpcut {

/// Reads a real Matrix Market file (coordinate or array; symmetric or general
/// with symmetric content) into a SymMat. Throws ParseError on malformed input.
SymMat read_matrix_market(std::istream& in);
SymMat read_matrix_market_file(const std::string& path);

/// Writes `coordinate real symmetric`, lower triangle, full round-trip precision.
void write_matrix_market(std::ostream& out, const SymMat& m);
void write_matrix_market_file(const std::string& path, const SymMat& m);

}  // namespace sdpcut
