// cli.hpp — command-line entry point: config, dispatch, artifacts, exit codes
//
// Exit codes: 0 success, 1 internal failure, 2 configuration error,
// 3 numerical failure. Errors print "error: <category>: <code>" on the first
// line of stderr, followed by human-readable detail.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bilayer::cli {

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bilayer::cli
