#pragma once

#include <string>
#include <vector>

namespace pdikit {

// Command dispatch for the pdikit tool. Subcommands: test, certify,
// bernstein-check, demo. Exit codes: 0 success, 1 rejected certification
// or dependence detected under --fail-on-dependence, 2 input/usage errors.
struct CommandResult {
    int exit_code = 0;
    std::string output;       // report (stdout)
    std::string diagnostics;  // errors (stderr)
};

CommandResult run_command(const std::vector<std::string>& argv);

extern const char* kToolVersion;

}  // namespace pdikit
