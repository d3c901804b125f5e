#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ladderkit {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitUsage = 2 };

// Runs the ladderkit command line; args excludes the program name. Results go
// to files or `out`, diagnostics to `err`. A failing command writes no files.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ladderkit
