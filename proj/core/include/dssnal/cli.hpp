#pragma once

#include <string>
#include <vector>

namespace dssnal {

/// Command-line entry point (subcommands: solve, gen-data, validate-gossip,
/// bench). Returns the process exit status; never throws.
int run_cli(int argc, const char* const* argv);

/// Convenience overload for in-process invocation: args exclude the
/// program name, e.g. {"solve", "--family", "huber", ...}.
int run_cli(const std::vector<std::string>& args);

}  // namespace dssnal
