#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hakernel::cli {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 ok, 2 usage, 3 data, 4 numeric.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1,2,8" or "1:40" (inclusive range) or a mix: "1:5,10,20".
std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// --threads value if positive, else HAKERNEL_THREADS if set, else 0 (library default).
int resolve_threads(int flag_value);

}  // namespace hakernel::cli
