#pragma once

#include <string>
#include <vector>

namespace dbmd {

// Entry point behind the dbmd binary (subcommands: synth, fit, eval,
// varratio, convergence). Returns the process exit code.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace dbmd
