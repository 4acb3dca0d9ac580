#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flagflow::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,      ///< invalid arguments or config
  kNumerical = 2,  ///< step collapse, blow-up, non-convergence
  kVerify = 3,     ///< a check ran and the property did not hold
};

/// Runs one invocation. `args` excludes the program name. Reports go to
/// `out` unless --out names a file; diagnostics always go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flagflow::cli
