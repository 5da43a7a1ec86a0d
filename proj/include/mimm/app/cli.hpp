#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mimm::app {

inline constexpr int kSchemaVersion = 1;

/// Entry point of the `mimm` tool.  args[0] is the program name.  Returns the
/// process exit code: 0 success, 2 validation, 3 numerical failure, 4 timeout.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mimm::app
