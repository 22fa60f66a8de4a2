#pragma once

#include <ostream>

namespace hadamard::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kUsageError = 2;

/// Entry point of the `hadamard` tool: subcommands decompose, experiment and
/// capacity. Results go to `out`, diagnostics and warnings to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hadamard::cli
