// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mapat::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2 };

// Runs `mapat <args...>` writing to the given streams; returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mapat::cli
