#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace gsml::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kRuntimeFailure = 2,
};

/// Runs one command. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run_main(int argc, const char* const* argv);

}  // namespace gsml::cli
