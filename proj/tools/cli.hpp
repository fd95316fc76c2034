#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace secalgo::cli {

/// Exit codes of the command-line tool.
enum Exit : int { ok = 0, usage = 1, crypto_failure = 2, misuse = 3 };

/// Runs one invocation. args excludes the program name. Output goes to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secalgo::cli
