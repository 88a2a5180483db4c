#pragma once

#include <iosfwd>
#include <string>

#include "sdpcut/model.hpp"

namespace sdpcut {

/// SDPA sparse format (.dat-s). Matrix 0 is the objective C; by default the
/// instance is min <C, X>, `maximize` reads it as max <C, X> instead. One
/// dense block, or any number of diagonal blocks (merged into one diagonal
/// block), is accepted; other block structures raise UnsupportedError.
/// Malformed lines raise ParseError with the line number.
SDPInstance parse_sdpa(std::istream& in, bool maximize = false);
SDPInstance parse_sdpa_file(const std::string& path, bool maximize = false);

/// One dense block, upper-triangle entries, round-trip precision.
void write_sdpa(std::ostream& out, const SDPInstance& instance);
void write_sdpa_file(const std::string& path, const SDPInstance& instance);

/// Finds an equality row alpha I . X = b with alpha > 0, removes it and sets
/// the trace bound b / alpha (equality mode). Returns false when none exists.
bool extract_trace_row(SDPInstance& instance, double tol = 1e-12);

}  // namespace sdpcut
