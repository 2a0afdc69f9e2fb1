#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wsa::cli {

// Exit codes: 0 success, 1 data/format/file error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the `wsa` binary. args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsa::cli
