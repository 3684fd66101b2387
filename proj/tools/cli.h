#ifndef NCYCLE_TOOLS_CLI_H
#define NCYCLE_TOOLS_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace ncycle::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_local = 2,
    exit_not_activated = 3,
    exit_usage = 64,
    exit_data = 65,
};

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace ncycle::cli

#endif
