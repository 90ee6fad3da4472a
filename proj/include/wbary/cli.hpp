#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wbary {

/// Runs the command-line interface. `args` excludes the program name.
/// Returns 0 on success, 1 on usage or input errors, 2 on numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace wbary
