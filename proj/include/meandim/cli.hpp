#pragma once

#include <ostream>

namespace meandim {

/// Command-line entry point. Exit codes: 0 ok, 2 precondition failure,
/// 3 obligation failed, 4 budget exceeded.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace meandim
