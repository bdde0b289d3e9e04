#ifndef DAEKIT_CLI_HPP
#define DAEKIT_CLI_HPP

namespace daekit::cli {

// Exit codes: 0 success, 1 runtime failure, 2 index too high, 3 parse or file
// error, 4 escape detected, 5 constraint violation, 64 usage error.
int run(int argc, const char* const* argv);

} // namespace daekit::cli

#endif
