#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace fdrlab::cli {

/// Dispatches one invocation. Exit status: 0 success, 2 configuration
/// error, 3 numerical-convergence failure.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace fdrlab::cli
