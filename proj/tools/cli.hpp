#pragma once

#include <iosfwd>

namespace lagsync::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kDivergence = 2, kBoundViolation = 3 };

/// Parses argv and runs one subcommand. Reports go to `out`, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace lagsync::cli
