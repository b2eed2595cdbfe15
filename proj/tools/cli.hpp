#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace panicle::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kParseFailure = 1,
    kValidationFailure = 2,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace panicle::cli
