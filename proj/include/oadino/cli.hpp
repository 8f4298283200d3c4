#pragma once

#include <string>
#include <vector>

namespace oadino::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericalError = 3;

int run(int argc, char** argv);
// args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace oadino::cli
