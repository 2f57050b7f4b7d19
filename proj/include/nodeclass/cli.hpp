#pragma once

#include <string_view>

namespace nodeclass {

inline constexpr std::string_view kVersion = "0.1.0";

// Exit codes: 0 success, 1 usage error, 2 data error.
int run_cli(int argc, char** argv);

}  // namespace nodeclass
