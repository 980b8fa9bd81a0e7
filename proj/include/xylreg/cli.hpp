#pragma once

#include <iosfwd>

namespace xylreg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kDataInvalid = 4,
  kModelMismatch = 5,
};

/// Entry point for the `xylreg` tool. Subcommands: gen-data, sweep, train,
/// predict, report. Diagnostics go to `err` as single lines.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xylreg::cli
