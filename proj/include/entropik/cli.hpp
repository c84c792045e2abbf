// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace entropik {

// Exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_diagnostics = 1,   // usage errors, model or bindings diagnostics
  exit_engine_error = 2,  // NonlinearInLeading, UnboundSymbol, ...
};

// entropik analyze|compare|split|verify|check <model-file> [flags].  `args`
// excludes the program name.  Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entropik
