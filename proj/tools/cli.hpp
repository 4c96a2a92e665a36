#pragma once

#include <iosfwd>

namespace ragaudit::cli {

/// Exit codes: 0 success, 1 input or validation error, 2 provider or output failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ragaudit::cli
