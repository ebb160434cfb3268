#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csgs {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitValidationFailure = 2,
    kExitNotConverged = 3,
};

/// csgs <validate|solve|sweep|compare|pohozaev|sobolev> --config <path> [--out <dir>] [--seed <n>]
/// `args` excludes the program name. Summaries go to `out`, errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csgs
