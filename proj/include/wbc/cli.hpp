#pragma once

#include <string>
#include <vector>

namespace wbc::cli {

// Exit codes: 0 ok, 1 internal error, 2 parse error, 3 premise failure,
// 4 inadmissible parameters, 5 enumeration/table cap exceeded.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kParseError = 2;
inline constexpr int kPremiseError = 3;
inline constexpr int kInadmissible = 4;
inline constexpr int kCapExceeded = 5;

inline constexpr const char* kArtifactVersion = "1.0.0";

int run(const std::vector<std::string>& args);  // args without argv[0]
int run(int argc, const char* const* argv);

}  // namespace wbc::cli
