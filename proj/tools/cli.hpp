#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iccscan {

/// Runs the command line `args` (without the program name), writing
/// results to `out` and messages to `err`.
///
/// Exit status: 0 when the analysis ran (with or without findings),
/// 1 on internal errors, 2 on usage, configuration or input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace iccscan
