#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tangent_topo/errors.hpp"

namespace ttopo::cli {

// Exit codes of the tangent_topo tool.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kValidation = 3,  // invalid geometry, non-tangent field, failed tangency or round trip
  kSumRule = 4,
  kResolution = 5,
  kIo = 6,  // unreadable/unwritable files and malformed documents
};

int exit_code_for(ErrorCode code);

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ttopo::cli
