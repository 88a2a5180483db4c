#pragma once

#include <string>
#include <vector>

#include "sdpcut/engine.hpp"

namespace sdpcut {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitIterationLimit = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitBackendFailure = 4;

int exit_code_for(EngineStatus status);

/// Subcommands solve-sdp, spca-bound, complete and bench. Diagnostics go to
/// standard error; results to the --out JSON/CSV files and a summary on
/// standard output.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace sdpcut
