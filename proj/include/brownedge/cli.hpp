#pragma once

#include <ostream>

namespace brownedge {

// Entry point of the command line tool. Exit codes: 0 success, 1 bad configuration,
// 2 numerical failure (a diagnostic JSON object is written to `err`).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brownedge
