#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bytegram::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bytegram::cli
