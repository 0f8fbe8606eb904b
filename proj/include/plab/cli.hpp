#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace plab {

// Parses and executes one command line (without the program name).
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
// 3 verification failed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plab
