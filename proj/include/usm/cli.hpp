#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace usm::cli {

// Exit codes: 0 ok, 2 parse error, 3 no template matched, 4 unintegrable
// remainder, 5 verification failed, 6 bad domain/branch, 1 anything else.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience wrapper for tests; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace usm::cli
