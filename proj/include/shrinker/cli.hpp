#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace shrinker {

// Stable exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitCaseNotCovered = 3,
  kExitNoRoot = 4,
};

// Runs one command; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace shrinker
