#pragma once

#include "panoworld/common/error.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace panoworld::service {

/// Process exit code per error class: 0 success, 1 domain, 2 usage, and a
/// distinct code for every other kind (see README). 70 for anything else.
int exit_code(ErrorKind kind);
inline constexpr int kInternalExit = 70;

/// The `panoworld` command line, runnable in-process. `args` excludes the
/// program name. Results go to --out files or `out`; diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace panoworld::service
