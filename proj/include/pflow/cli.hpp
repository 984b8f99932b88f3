#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pflow::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  exit_ok = 0,          // solved / feasible as-is
  exit_restored = 2,    // feasibility restored by switching
  exit_infeasible = 3,  // not solvable (or not restorable)
  exit_input_error = 64 // bad file, bad flags, failed validation
};

/// Run one command (`solve`, `fit`, `restore`, `compare`) with CLI-style
/// arguments (excluding the program name). Reports go to `out` unless --out
/// redirects them to a file; diagnostics go to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// main()-shaped wrapper around run().
int run_main(int argc, char** argv);

}  // namespace pflow::cli
