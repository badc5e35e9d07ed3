#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnets::cli {

enum Exit : int {
    Success = 0,
    Refuted = 1,
    Inconclusive = 2,
    Usage = 64,
    DataError = 65,
    NoInput = 66,
};

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dnets::cli
