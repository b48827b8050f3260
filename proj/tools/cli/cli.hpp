#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slca::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInvalidConfig = 1,
  kIoFailure = 2,
  kNumericalFailure = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Subcommands: run, gen-synth, probe, cka, align-only,
/// snapshot.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slca::cli
