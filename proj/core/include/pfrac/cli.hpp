#pragma once

#include <string>
#include <vector>

namespace pfrac {

/// Entry point shared by the pfrac binary and the CLI tests.
/// Exit codes: 0 success, 1 usage, 2 non-convergence, 3 I/O or parse failure.
int cli_main(const std::vector<std::string>& args);

} // namespace pfrac
