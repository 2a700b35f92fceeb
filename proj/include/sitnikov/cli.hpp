#pragma once

#include <string>
#include <vector>

namespace sitnikov::cli {

/// Dispatch one invocation (args exclude the program name).
/// Exit codes: 0 success, 2 validation error, 3 solver non-convergence or
/// failed verification.
int run(std::vector<std::string> args);

}  // namespace sitnikov::cli
