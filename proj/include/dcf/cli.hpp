#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcf::cli {

enum ExitCode
{
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kDivergence = 3,
  kUnsupportedPhy = 4,
};

/// Entry point of the dcfmodel tool. args[0] is the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace dcf::cli
