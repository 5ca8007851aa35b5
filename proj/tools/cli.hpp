#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace citefair::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2 };

/// Runs one command line (args exclude the program name). Diagnostics go to
/// err; --stdout mirrors and summaries go to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace citefair::cli
