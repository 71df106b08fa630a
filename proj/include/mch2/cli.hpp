#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mch2 {

inline constexpr const char* version = "0.1.0";

// Entry point of the mch2 tool. args excludes the program name.
// Exit codes: 0 success, 1 runtime or assertion failure, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mch2
