#pragma once

#include <ostream>
#include <span>
#include <string_view>

namespace dcube::cli {

enum ExitCode : int { kPass = 0, kPropertyFailure = 1, kHypothesesUnmet = 2, kInputError = 3 };

// Runs one command line (without the program name). Reports go to `out`,
// diagnostics to `err`.
int run(std::span<const std::string_view> args, std::ostream& out, std::ostream& err);

}  // namespace dcube::cli
