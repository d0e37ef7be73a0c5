#pragma once

#include <iosfwd>

namespace modecoupler::cli {

// Entry point behind main().  Exit codes: 0 success, 1 domain error
// (validation, parsing, usage), 2 numerical failure.  Diagnostics go to err;
// data and reports go to out or to files named by the flags.  Given identical
// inputs and --seed, every subcommand produces byte-identical output.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modecoupler::cli
