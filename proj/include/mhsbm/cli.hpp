#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mhsbm {

inline constexpr const char* kVersion = "mhsbm 0.1.0";

/// Entry point of the `mhsbm` executable. args[0] is the program name.
/// Returns 0 on success, 1 on model or I/O errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mhsbm
