#ifndef STARPEG_CLI_REPORT_HPP
#define STARPEG_CLI_REPORT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starpeg/cli/config.hpp"

namespace starpeg::cli {

inline constexpr const char* kSchemaId = "starpeg.result/1";
inline constexpr const char* kSolverVersion = "starpeg 1.0.0";

struct CurveEcho {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

struct FieldEcho {
  std::vector<HarmonicTerm> terms;
  bool even_only = false;
};

struct SquareRecord {
  std::array<std::array<double, 2>, 4> vertices{};
  double x = 0;
  std::array<double, 4> t{};
  double side = 0;
  double sigma_min = 0;
  double residual_norm = 0;
};

struct TableRecord {
  std::array<double, 3> x{};
  double a = 0;
  double phi = 0;
  std::array<std::array<double, 3>, 4> points{};
  double value_spread = 0;
  std::optional<double> center_norm;
};

struct ParityRecord {
  int count = 0;
  int parity = 0;
};

struct FoldRecord {
  double s = 0;
  int direction = 0;
  double sigma_min = 0;
  double x = 0;
  std::array<double, 4> t{};
};

struct ContinuationRecord {
  int steps = 0;
  int samples = 0;
  int rejected_steps = 0;
  double min_sigma = 0;
  std::vector<FoldRecord> folds;
};

struct SweepPointRecord {
  std::array<double, 3> x{};
  int count = 0;
  int parity = 0;
  std::string status;
};

struct SweepRecord {
  int rows = 0;
  int generic_points = 0;
  int flagged_points = 0;
  bool all_generic_odd = true;
  std::vector<SweepPointRecord> points;
};

struct EventRecord {
  std::string kind;
  std::string detail;
};

/// Everything a run reports. `status` is one of "ok", "degenerate_family",
/// "genericity_failure", "solver_coverage_failure", "tracking_loss",
/// "fit_failure".
struct ResultDocument {
  std::string schema = kSchemaId;
  std::string solver_version = kSolverVersion;
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::string status = "ok";
  std::optional<CurveEcho> curve;
  std::optional<FieldEcho> field;
  std::optional<double> radius;
  std::vector<SquareRecord> squares;
  std::vector<TableRecord> tables;
  std::optional<ParityRecord> parity;
  std::optional<ContinuationRecord> continuation;
  std::optional<SweepRecord> sweep;
  std::vector<EventRecord> events;
  std::optional<double> wall_clock_seconds;
};

nlohmann::json to_json(const ResultDocument& doc);
// Throws std::invalid_argument when the JSON does not match the schema.
ResultDocument result_from_json(const nlohmann::json& j);

// Schema violations of a JSON document; empty means valid.
std::vector<std::string> validate_result_json(const nlohmann::json& j);

// Two-space indented JSON with a trailing newline.
std::string serialize(const ResultDocument& doc);

nlohmann::json config_echo(const RunConfig& cfg);

SquareRecord square_record(const SquareSolution& s);
TableRecord table_record(const TableSolution& t);

}  // namespace starpeg::cli

#endif  // STARPEG_CLI_REPORT_HPP
