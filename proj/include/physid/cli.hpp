#pragma once

#include <ostream>

namespace physid {

// Subcommands: simulate, fit, eval, report, select, sweep. Returns the
// process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace physid
