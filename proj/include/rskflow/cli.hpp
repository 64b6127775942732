#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rskflow::cli {

enum ExitCode : int {
  kSuccess = 0,
  kMismatch = 1,
  kInconclusive = 2,
  kUsage = 3,
};

// args excludes the program name. Reports go to out unless --output names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes to a sibling temporary file, then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rskflow::cli
