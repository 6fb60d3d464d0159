#pragma once

// Command line front end.  Subcommands: generate, verify, simulate, bench,
// convert, info.  Exit status 0 on success, 1 when a verification or
// decoding check fails, 2 on bad input.

#include <iosfwd>
#include <string>
#include <vector>

namespace lincache {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lincache
