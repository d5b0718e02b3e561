#pragma once

#include <iosfwd>

namespace oqha::cli {

// Exit codes: 0 success, 1 mathematical failure or failed gate, 2 bad input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oqha::cli
