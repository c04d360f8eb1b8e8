#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gibbsnet::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,  // audit or validation failure
    kUsage = 2,
    kIo = 3,
};

/// Runs the `gibbsnet` command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gibbsnet::cli
