#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctrlgrad::cli {

enum ExitCode : int {
    ok = 0,
    usage = 1,
    numerical = 2,
    io_failure = 3,
};

inline constexpr const char* kToolVersion = "0.3.0";

/// Parses `args` (args[0] is the program name) and runs the selected
/// subcommand: controllability, flow, descend, prox, cs, selftest.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ctrlgrad::cli
