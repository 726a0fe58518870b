#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace brokenpde::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,         ///< any other error (missing file, out-of-range point, ...)
  kConfigError = 2,
  kNoConvergence = 3,
  kAcceptanceFailed = 4,
};

/// Entry point of the brokenpde tool. Subcommands: solve, transform, nodal,
/// order, frequency, oracle-compare, verify. Diagnostics go to stderr.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  ///< args[0] is the program name

/// 64-bit FNV-1a, used for the config hash in manifest.json.
std::uint64_t fnv1a(std::string_view bytes);

const char* version();

}  // namespace brokenpde::cli
