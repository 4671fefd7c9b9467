#pragma once

// Command-line front end: `itn ingest | analyze | richclub | simulate`.
// Every command writes into its --out directory together with a
// manifest.json recording the effective options, input digests and outputs.

#include <iosfwd>
#include <string>
#include <vector>

namespace itn::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kBudgetError = 3,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace itn::cli
