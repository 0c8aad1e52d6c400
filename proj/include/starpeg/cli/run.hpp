#ifndef STARPEG_CLI_RUN_HPP
#define STARPEG_CLI_RUN_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "starpeg/cli/config.hpp"
#include "starpeg/cli/report.hpp"

namespace starpeg::cli {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitSolverFailure = 2 };

struct RunOptions {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_path;  // overrides output.result
  std::optional<std::string> svg_path;  // overrides output.svg
  std::optional<std::uint64_t> seed;    // overrides the config seed
  bool timing = false;                  // record wall-clock seconds in the document
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::optional<ResultDocument> document;  // absent on input errors
  std::string message;
};

/// Runs a parsed config without touching the filesystem. Solver outcomes
/// (degenerate families, genericity and coverage failures) are reported in
/// the document; precondition violations become input errors.
RunOutcome execute(const RunConfig& cfg, bool timing = false);

/// Full command: parse the config, execute, write the document (to stdout
/// when no path is given) and the optional SVG. Diagnostics go to `err`.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace starpeg::cli

#endif  // STARPEG_CLI_RUN_HPP
