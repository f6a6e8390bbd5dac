#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace typocorpus::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitIo = 3,
};

inline constexpr const char* kToolVersion = "1.0.0";

/// Runs one subcommand. Data goes to `out` (or the --out file), diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with args excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace typocorpus::cli
