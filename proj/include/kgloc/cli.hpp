#pragma once

#include <iosfwd>

namespace kgloc {

// exit codes of the command-line tool
enum ExitCode : int {
    kExitOk = 0,
    kExitSuiteFailed = 1,
    kExitConfigError = 2,  // malformed config or bad arguments
    kExitMissingFile = 3,
    kExitError = 4,  // anything else (numerical failure, unwritable output, ...)
};

int cli_main(int argc, const char* const* argv);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kgloc
