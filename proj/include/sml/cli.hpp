#pragma once

#include <string>
#include <vector>

// Command-line front end. Subcommands:
//   run <config>      one experiment; EMSE CSV + JSON manifest
//   compare <config>  >= 2 algorithms side by side on one plant
//   verify            self-check suite (--scale small|full)
// Exit codes: 0 success, 2 config/usage error, 3 divergence,
// 4 verification failure.

namespace sml {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitVerifyFailure = 4;

// Hex SHA-1 of the bytes in git blob framing ("blob <len>\0" + bytes).
std::string git_blob_sha1(const std::string& bytes);

int run_cli(const std::vector<std::string>& args);

}  // namespace sml
