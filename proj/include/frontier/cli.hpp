#pragma once

#include <iosfwd>

namespace frontier {

/// Runs one `frontier` invocation. `in` backs the "-" input path and `out`
/// the default output; errors go to `err` as one JSON line. Returns 0 on
/// success, 1 on estimation or data errors and 2 on invalid flags.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace frontier
