#include "starpeg/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "starpeg/errors.hpp"

namespace starpeg::cli {
namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) throw ConfigError(where + " must be a mapping", line_of(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where, line_of(kv.first));
    }
  }
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) throw ConfigError(what + " must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("cannot read " + what + " from '" + n.Scalar() + "'", line_of(n));
  }
}

double finite_double(const YAML::Node& n, const std::string& what) {
  const double v = scalar<double>(n, what);
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite", line_of(n));
  return v;
}

std::vector<double> double_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) throw ConfigError(what + " must be a list of numbers", line_of(n));
  std::vector<double> out;
  for (const auto& e : n) out.push_back(finite_double(e, what + " entry"));
  return out;
}

CurveSpec parse_curve(const YAML::Node& n) {
  check_keys(n, {"cos", "sin", "preset", "random"}, "curve");
  CurveSpec spec;
  const int sources = int(bool(n["cos"]) || bool(n["sin"])) + int(bool(n["preset"])) +
                      int(bool(n["random"]));
  if (sources != 1) {
    throw ConfigError("curve needs exactly one of cos/sin, preset or random", line_of(n));
  }
  if (n["preset"]) {
    const auto name = scalar<std::string>(n["preset"], "curve.preset");
    if (name != "ellipse") throw ConfigError("unknown curve preset '" + name + "'", line_of(n["preset"]));
    spec.kind = CurveSpec::Kind::Ellipse;
  } else if (n["random"]) {
    const YAML::Node r = n["random"];
    check_keys(r, {"degree", "rho"}, "curve.random");
    spec.kind = CurveSpec::Kind::Random;
    if (r["degree"]) spec.random_degree = scalar<int>(r["degree"], "curve.random.degree");
    if (r["rho"]) spec.random_rho = finite_double(r["rho"], "curve.random.rho");
    if (spec.random_degree < 1 || spec.random_degree > kDefaultDegreeCap || !(spec.random_rho > 0)) {
      throw ConfigError("curve.random needs 1 <= degree <= 64 and rho > 0", line_of(r));
    }
  } else {
    spec.kind = CurveSpec::Kind::Coefficients;
    if (n["cos"]) spec.cos_coeffs = double_list(n["cos"], "curve.cos");
    if (n["sin"]) spec.sin_coeffs = double_list(n["sin"], "curve.sin");
    if (spec.cos_coeffs.empty()) throw ConfigError("curve.cos needs at least the constant term", line_of(n));
    const auto len = std::max(spec.cos_coeffs.size(), spec.sin_coeffs.size());
    if (len > static_cast<std::size_t>(kDefaultDegreeCap) + 1) {
      throw ConfigError("curve degree exceeds the cap of 64", line_of(n));
    }
  }
  return spec;
}

FieldSpec parse_field(const YAML::Node& n) {
  check_keys(n, {"even_only", "terms"}, "field");
  FieldSpec spec;
  if (n["even_only"]) spec.even_only = scalar<bool>(n["even_only"], "field.even_only");
  const YAML::Node terms = n["terms"];
  if (!terms || !terms.IsSequence() || terms.size() == 0) {
    throw ConfigError("field.terms must be a non-empty list of [l, m, coefficient]", line_of(n));
  }
  for (const auto& t : terms) {
    if (!t.IsSequence() || t.size() != 3) {
      throw ConfigError("field term must be [l, m, coefficient]", line_of(t));
    }
    spec.terms.push_back({scalar<int>(t[0], "term degree"), scalar<int>(t[1], "term order"),
                          finite_double(t[2], "term coefficient")});
  }
  try {
    (void)ScalarField(spec.terms, spec.even_only);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what(), line_of(terms));
  }
  return spec;
}

void parse_solver(const YAML::Node& n, SolveConfig& s) {
  check_keys(n, {"grid_density", "simplex_density", "newton_tol", "newton_max_iter", "dedupe_tol",
                 "genericity_floor"},
             "solver");
  if (n["grid_density"]) s.grid_density = scalar<int>(n["grid_density"], "solver.grid_density");
  if (n["simplex_density"]) s.simplex_density = scalar<int>(n["simplex_density"], "solver.simplex_density");
  if (n["newton_tol"]) s.newton_tol = finite_double(n["newton_tol"], "solver.newton_tol");
  if (n["newton_max_iter"]) s.newton_max_iter = scalar<int>(n["newton_max_iter"], "solver.newton_max_iter");
  if (n["dedupe_tol"]) s.dedupe_tol = finite_double(n["dedupe_tol"], "solver.dedupe_tol");
  if (n["genericity_floor"]) s.genericity_floor = finite_double(n["genericity_floor"], "solver.genericity_floor");
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what(), line_of(n));
  }
}

void parse_table(const YAML::Node& n, TableConfig& t) {
  check_keys(n, {"base_seeds", "phi_seeds", "newton_tol", "newton_max_iter", "dedupe_tol",
                 "genericity_floor", "sweep_rows", "center_tol"},
             "table");
  if (n["base_seeds"]) t.base_seeds = scalar<int>(n["base_seeds"], "table.base_seeds");
  if (n["phi_seeds"]) t.phi_seeds = scalar<int>(n["phi_seeds"], "table.phi_seeds");
  if (n["newton_tol"]) t.newton_tol = finite_double(n["newton_tol"], "table.newton_tol");
  if (n["newton_max_iter"]) t.newton_max_iter = scalar<int>(n["newton_max_iter"], "table.newton_max_iter");
  if (n["dedupe_tol"]) t.dedupe_tol = finite_double(n["dedupe_tol"], "table.dedupe_tol");
  if (n["genericity_floor"]) t.genericity_floor = finite_double(n["genericity_floor"], "table.genericity_floor");
  if (n["sweep_rows"]) t.sweep_rows = scalar<int>(n["sweep_rows"], "table.sweep_rows");
  if (n["center_tol"]) t.center_tol = finite_double(n["center_tol"], "table.center_tol");
  try {
    t.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what(), line_of(n));
  }
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::PegFind: return "peg-find";
    case Command::PegParity: return "peg-parity";
    case Command::PegContinue: return "peg-continue";
    case Command::TableFind: return "table-find";
    case Command::TableCenter: return "table-center";
    case Command::FiberParity: return "fiber-parity";
  }
  return "";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::PegFind, Command::PegParity, Command::PegContinue, Command::TableFind,
                    Command::TableCenter, Command::FiberParity}) {
    if (name == command_name(c)) return c;
  }
  return std::nullopt;
}

bool is_peg_command(Command c) {
  return c == Command::PegFind || c == Command::PegParity || c == Command::PegContinue;
}

RunConfig parse_run_config(const std::string& text, Command command) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  check_keys(root, {"curve", "field", "radius", "solver", "table", "continuation", "sweep", "seed", "output"},
             "config");

  RunConfig cfg;
  cfg.command = command;
  const bool peg = is_peg_command(command);
  if (peg) {
    if (!root["curve"]) throw ConfigError(std::string(command_name(command)) + " needs a curve block", 0);
    if (root["field"]) throw ConfigError("field block is not used by " + std::string(command_name(command)), line_of(root["field"]));
    if (root["radius"]) throw ConfigError("radius is not used by " + std::string(command_name(command)), line_of(root["radius"]));
    cfg.curve = parse_curve(root["curve"]);
  } else {
    if (!root["field"]) throw ConfigError(std::string(command_name(command)) + " needs a field block", 0);
    if (root["curve"]) throw ConfigError("curve block is not used by " + std::string(command_name(command)), line_of(root["curve"]));
    if (!root["radius"]) throw ConfigError(std::string(command_name(command)) + " needs a radius", 0);
    cfg.field = parse_field(root["field"]);
    cfg.radius = finite_double(root["radius"], "radius");
  }
  if (root["solver"]) parse_solver(root["solver"], cfg.solver);
  cfg.table.peg = cfg.solver;
  if (root["table"]) parse_table(root["table"], cfg.table);
  if (root["continuation"]) {
    const YAML::Node c = root["continuation"];
    check_keys(c, {"steps"}, "continuation");
    if (c["steps"]) cfg.continuation_steps = scalar<int>(c["steps"], "continuation.steps");
    if (cfg.continuation_steps < 1) throw ConfigError("continuation.steps must be positive", line_of(c));
  }
  if (root["sweep"]) {
    const YAML::Node s = root["sweep"];
    check_keys(s, {"rows"}, "sweep");
    if (s["rows"]) cfg.sweep_rows = scalar<int>(s["rows"], "sweep.rows");
    if (cfg.sweep_rows < 2) throw ConfigError("sweep.rows must be at least 2", line_of(s));
  }
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["output"]) {
    const YAML::Node o = root["output"];
    check_keys(o, {"result", "svg"}, "output");
    if (o["result"]) cfg.result_path = scalar<std::string>(o["result"], "output.result");
    if (o["svg"]) cfg.svg_path = scalar<std::string>(o["svg"], "output.svg");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), command);
}

RadialFunctiond resolve_curve(const CurveSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case CurveSpec::Kind::Ellipse:
      return ellipse_radial<double>();
    case CurveSpec::Kind::Random:
      return random_radial(seed, spec.random_degree, spec.random_rho);
    case CurveSpec::Kind::Coefficients:
      break;
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(spec.cos_coeffs.data(), spec.cos_coeffs.size());
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(spec.sin_coeffs.data(), spec.sin_coeffs.size());
  return RadialFunctiond(a, b);
}

ScalarField resolve_field(const FieldSpec& spec) { return ScalarField(spec.terms, spec.even_only); }

}  // namespace starpeg::cli
