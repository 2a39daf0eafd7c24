#pragma once

#include <iosfwd>

namespace cbtau::tools {

// Exit codes: 0 success or identity holds, 1 identity fails, 2 bad parameters or usage,
// 3 unexpected internal error.
enum ExitCode { exit_ok = 0, exit_identity_fail = 1, exit_param = 2, exit_internal = 3 };

// Parses argv, runs one subcommand and writes its artifact to `out` (or --out), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbtau::tools
