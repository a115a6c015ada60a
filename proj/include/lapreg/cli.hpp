#pragma once

#include <iosfwd>

namespace lapreg {

/// Exit codes: 0 success, 1 validation error, 2 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lapreg
