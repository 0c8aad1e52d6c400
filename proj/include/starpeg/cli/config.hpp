#ifndef STARPEG_CLI_CONFIG_HPP
#define STARPEG_CLI_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starpeg/peg_solver.hpp"
#include "starpeg/sphere_geometry.hpp"
#include "starpeg/table_solver.hpp"

namespace starpeg::cli {

enum class Command { PegFind, PegParity, PegContinue, TableFind, TableCenter, FiberParity };

const char* command_name(Command c);
std::optional<Command> parse_command(const std::string& name);
bool is_peg_command(Command c);

// Config errors carry the 1-based line of the offending node (0 if unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct CurveSpec {
  enum class Kind { Coefficients, Ellipse, Random };
  Kind kind = Kind::Coefficients;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  int random_degree = 8;
  double random_rho = 0.6;
};

struct FieldSpec {
  std::vector<HarmonicTerm> terms;
  bool even_only = false;
};

struct RunConfig {
  Command command = Command::PegFind;
  std::optional<CurveSpec> curve;
  std::optional<FieldSpec> field;
  std::optional<double> radius;
  SolveConfig solver;
  TableConfig table;
  int continuation_steps = 100;
  int sweep_rows = 12;
  std::uint64_t seed = 0;
  std::optional<std::string> result_path;
  std::optional<std::string> svg_path;
};

/// Parses the YAML config text for `command`. Unknown keys, missing blocks
/// the command needs, and blocks it does not take are all errors.
RunConfig parse_run_config(const std::string& text, Command command);
RunConfig load_run_config(const std::string& path, Command command);

// Resolves the curve block into a radial function (seeded for random curves).
RadialFunctiond resolve_curve(const CurveSpec& spec, std::uint64_t seed);
ScalarField resolve_field(const FieldSpec& spec);

}  // namespace starpeg::cli

#endif  // STARPEG_CLI_CONFIG_HPP
