#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace multierg::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kInvalidConfig = 1,
    kNonConvergence = 2,
    kVerificationFailed = 3,
};

/// Entry point shared by the executable and the tests. args[0] is the program
/// name, args[1] the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace multierg::cli
