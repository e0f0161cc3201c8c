#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pvar::cli {

enum Exit : int { Ok = 0, Invalid = 2, Numerical = 3 };

/// Runs one job from command-line arguments (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pvar::cli
