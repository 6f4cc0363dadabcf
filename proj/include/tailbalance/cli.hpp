#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailbalance {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // bad flags, files or parameter ranges
inline constexpr int kExitDegenerate = 2;  // solver degeneracy, message verbatim
inline constexpr int kExitVerifyFail = 3;  // verify: residual above --tol

// Entry point of the command-line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailbalance
