#pragma once

#include "mfm/errors.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mfm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// 3 for numeric failures (no convergence, divergence), 2 for everything else.
int exit_code_for(ErrorKind kind);

/// `start:stop:step`, endpoints inclusive within half a step.
std::vector<double> parse_grid(std::string_view spec);

/// Runs one invocation; args exclude the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfm::cli
