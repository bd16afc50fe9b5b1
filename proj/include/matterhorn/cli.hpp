#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matterhorn {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitConfig = 3, kExitVerifyFailed = 4 };

/// Runs one command line (without the program name). Results go to out,
/// diagnostics and machine-readable errors to err. MATTERHORN_SEED, when
/// set, overrides --seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matterhorn
