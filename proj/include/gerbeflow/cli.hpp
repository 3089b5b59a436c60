#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gerbeflow::cli {

inline constexpr const char* kEngineVersion = "1.0.0";

// Runs one command line (without the program name). Returns 0 if no check failed,
// 1 if some check failed and 2 for invalid input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Report JSON with the timing field removed, for golden comparison.
std::string strip_timing(const std::string& report_json);

}  // namespace gerbeflow::cli
