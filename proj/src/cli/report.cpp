#include "starpeg/cli/report.hpp"

#include <set>
#include <stdexcept>

namespace starpeg::cli {
namespace {

using nlohmann::json;

const std::set<std::string> kStatuses = {"ok",          "degenerate_family", "genericity_failure",
                                         "solver_coverage_failure", "tracking_loss", "fit_failure"};

template <std::size_t N>
json array_of(const std::array<double, N>& a) {
  json out = json::array();
  for (double v : a) out.push_back(v);
  return out;
}

template <std::size_t N>
std::array<double, N> read_array(const json& j) {
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j.at(i).get<double>();
  return out;
}

json square_json(const SquareRecord& s) {
  json v = json::array();
  for (const auto& p : s.vertices) v.push_back(array_of(p));
  return {{"vertices", v},        {"x", s.x},
          {"t", array_of(s.t)},   {"side", s.side},
          {"sigma_min", s.sigma_min}, {"residual_norm", s.residual_norm}};
}

json table_json(const TableRecord& t) {
  json pts = json::array();
  for (const auto& p : t.points) pts.push_back(array_of(p));
  json j = {{"x", array_of(t.x)},   {"a", t.a}, {"phi", t.phi}, {"points", pts},
            {"value_spread", t.value_spread}};
  if (t.center_norm) j["center_norm"] = *t.center_norm;
  return j;
}

// Minimal structural checker: each call records a violation instead of throwing.
class Checker {
 public:
  explicit Checker(std::vector<std::string>& errors) : errors_(errors) {}

  bool object(const json& j, const std::string& path, const std::set<std::string>& required,
              const std::set<std::string>& optional) {
    if (!j.is_object()) return fail(path, "must be an object");
    bool ok = true;
    for (const auto& key : required) {
      if (!j.contains(key)) ok = fail(path, "missing key '" + key + "'");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!required.count(it.key()) && !optional.count(it.key())) {
        ok = fail(path, "unexpected key '" + it.key() + "'");
      }
    }
    return ok;
  }

  bool number(const json& j, const std::string& path) {
    return j.is_number() ? true : fail(path, "must be a number");
  }
  bool integer(const json& j, const std::string& path) {
    return j.is_number_integer() ? true : fail(path, "must be an integer");
  }
  bool string(const json& j, const std::string& path) {
    return j.is_string() ? true : fail(path, "must be a string");
  }
  bool boolean(const json& j, const std::string& path) {
    return j.is_boolean() ? true : fail(path, "must be a boolean");
  }
  bool numbers(const json& j, const std::string& path, std::optional<std::size_t> size = {}) {
    if (!j.is_array()) return fail(path, "must be an array");
    if (size && j.size() != *size) return fail(path, "must have " + std::to_string(*size) + " entries");
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) ok = number(j[i], path + "[" + std::to_string(i) + "]") && ok;
    return ok;
  }
  bool points(const json& j, const std::string& path, std::size_t count, std::size_t dim) {
    if (!j.is_array() || j.size() != count) {
      return fail(path, "must be an array of " + std::to_string(count) + " points");
    }
    bool ok = true;
    for (std::size_t i = 0; i < count; ++i) ok = numbers(j[i], path + "[" + std::to_string(i) + "]", dim) && ok;
    return ok;
  }
  template <typename Fn>
  bool each(const json& j, const std::string& path, Fn&& fn) {
    if (!j.is_array()) return fail(path, "must be an array");
    for (std::size_t i = 0; i < j.size(); ++i) fn(j[i], path + "[" + std::to_string(i) + "]");
    return true;
  }

  bool fail(const std::string& path, const std::string& msg) {
    errors_.push_back(path + ": " + msg);
    return false;
  }

 private:
  std::vector<std::string>& errors_;
};

void check_square(Checker& c, const json& j, const std::string& p) {
  if (!c.object(j, p, {"vertices", "x", "t", "side", "sigma_min", "residual_norm"}, {})) return;
  c.points(j["vertices"], p + ".vertices", 4, 2);
  c.number(j["x"], p + ".x");
  c.numbers(j["t"], p + ".t", 4);
  c.number(j["side"], p + ".side");
  c.number(j["sigma_min"], p + ".sigma_min");
  c.number(j["residual_norm"], p + ".residual_norm");
}

void check_table(Checker& c, const json& j, const std::string& p) {
  if (!c.object(j, p, {"x", "a", "phi", "points", "value_spread"}, {"center_norm"})) return;
  c.numbers(j["x"], p + ".x", 3);
  c.number(j["a"], p + ".a");
  c.number(j["phi"], p + ".phi");
  c.points(j["points"], p + ".points", 4, 3);
  c.number(j["value_spread"], p + ".value_spread");
  if (j.contains("center_norm")) c.number(j["center_norm"], p + ".center_norm");
}

void check_fold(Checker& c, const json& j, const std::string& p) {
  if (!c.object(j, p, {"s", "direction", "sigma_min", "x", "t"}, {})) return;
  c.number(j["s"], p + ".s");
  c.integer(j["direction"], p + ".direction");
  c.number(j["sigma_min"], p + ".sigma_min");
  c.number(j["x"], p + ".x");
  c.numbers(j["t"], p + ".t", 4);
}

void check_sweep_point(Checker& c, const json& j, const std::string& p) {
  if (!c.object(j, p, {"x", "count", "parity", "status"}, {})) return;
  c.numbers(j["x"], p + ".x", 3);
  c.integer(j["count"], p + ".count");
  c.integer(j["parity"], p + ".parity");
  c.string(j["status"], p + ".status");
}

}  // namespace

json to_json(const ResultDocument& doc) {
  json j;
  j["schema"] = doc.schema;
  j["solver_version"] = doc.solver_version;
  j["command"] = doc.command;
  j["seed"] = doc.seed;
  j["config"] = doc.config;
  j["status"] = doc.status;
  if (doc.curve) j["curve"] = {{"cos", doc.curve->cos_coeffs}, {"sin", doc.curve->sin_coeffs}};
  if (doc.field) {
    json terms = json::array();
    for (const auto& t : doc.field->terms) terms.push_back({t.degree, t.order, t.coeff});
    j["field"] = {{"even_only", doc.field->even_only}, {"terms", terms}};
  }
  if (doc.radius) j["radius"] = *doc.radius;
  j["squares"] = json::array();
  for (const auto& s : doc.squares) j["squares"].push_back(square_json(s));
  j["tables"] = json::array();
  for (const auto& t : doc.tables) j["tables"].push_back(table_json(t));
  if (doc.parity) j["parity"] = {{"count", doc.parity->count}, {"parity", doc.parity->parity}};
  if (doc.continuation) {
    const auto& c = *doc.continuation;
    json folds = json::array();
    for (const auto& f : c.folds) {
      folds.push_back({{"s", f.s}, {"direction", f.direction}, {"sigma_min", f.sigma_min}, {"x", f.x},
                       {"t", array_of(f.t)}});
    }
    j["continuation"] = {{"steps", c.steps},         {"samples", c.samples},
                         {"rejected_steps", c.rejected_steps}, {"min_sigma", c.min_sigma},
                         {"folds", folds}};
  }
  if (doc.sweep) {
    const auto& s = *doc.sweep;
    json pts = json::array();
    for (const auto& p : s.points) {
      pts.push_back({{"x", array_of(p.x)}, {"count", p.count}, {"parity", p.parity}, {"status", p.status}});
    }
    j["sweep"] = {{"rows", s.rows},
                  {"generic_points", s.generic_points},
                  {"flagged_points", s.flagged_points},
                  {"all_generic_odd", s.all_generic_odd},
                  {"points", pts}};
  }
  j["events"] = json::array();
  for (const auto& e : doc.events) j["events"].push_back({{"kind", e.kind}, {"detail", e.detail}});
  if (doc.wall_clock_seconds) j["wall_clock_seconds"] = *doc.wall_clock_seconds;
  return j;
}

std::vector<std::string> validate_result_json(const json& j) {
  std::vector<std::string> errors;
  Checker c(errors);
  if (!c.object(j, "$", {"schema", "solver_version", "command", "seed", "config", "status", "squares", "tables", "events"},
                {"curve", "field", "radius", "parity", "continuation", "sweep", "wall_clock_seconds"})) {
    return errors;
  }
  if (c.string(j["schema"], "$.schema") && j["schema"] != kSchemaId) c.fail("$.schema", "unknown schema id");
  c.string(j["solver_version"], "$.solver_version");
  if (c.string(j["command"], "$.command") && !parse_command(j["command"].get<std::string>())) {
    c.fail("$.command", "unknown command");
  }
  if (!j["seed"].is_number_unsigned()) c.fail("$.seed", "must be a non-negative integer");
  if (!j["config"].is_object()) c.fail("$.config", "must be an object");
  if (c.string(j["status"], "$.status") && !kStatuses.count(j["status"].get<std::string>())) {
    c.fail("$.status", "unknown status");
  }
  if (j.contains("curve") && c.object(j["curve"], "$.curve", {"cos", "sin"}, {})) {
    c.numbers(j["curve"]["cos"], "$.curve.cos");
    c.numbers(j["curve"]["sin"], "$.curve.sin");
  }
  if (j.contains("field") && c.object(j["field"], "$.field", {"even_only", "terms"}, {})) {
    c.boolean(j["field"]["even_only"], "$.field.even_only");
    c.each(j["field"]["terms"], "$.field.terms", [&](const json& t, const std::string& p) {
      if (!t.is_array() || t.size() != 3) {
        c.fail(p, "must be [l, m, coefficient]");
        return;
      }
      c.integer(t[0], p + "[0]");
      c.integer(t[1], p + "[1]");
      c.number(t[2], p + "[2]");
    });
  }
  if (j.contains("radius")) c.number(j["radius"], "$.radius");
  c.each(j["squares"], "$.squares", [&](const json& s, const std::string& p) { check_square(c, s, p); });
  c.each(j["tables"], "$.tables", [&](const json& t, const std::string& p) { check_table(c, t, p); });
  if (j.contains("parity") && c.object(j["parity"], "$.parity", {"count", "parity"}, {})) {
    c.integer(j["parity"]["count"], "$.parity.count");
    c.integer(j["parity"]["parity"], "$.parity.parity");
  }
  if (j.contains("continuation") &&
      c.object(j["continuation"], "$.continuation", {"steps", "samples", "rejected_steps", "min_sigma", "folds"}, {})) {
    const json& k = j["continuation"];
    c.integer(k["steps"], "$.continuation.steps");
    c.integer(k["samples"], "$.continuation.samples");
    c.integer(k["rejected_steps"], "$.continuation.rejected_steps");
    c.number(k["min_sigma"], "$.continuation.min_sigma");
    c.each(k["folds"], "$.continuation.folds", [&](const json& f, const std::string& p) { check_fold(c, f, p); });
  }
  if (j.contains("sweep") &&
      c.object(j["sweep"], "$.sweep", {"rows", "generic_points", "flagged_points", "all_generic_odd", "points"}, {})) {
    const json& s = j["sweep"];
    c.integer(s["rows"], "$.sweep.rows");
    c.integer(s["generic_points"], "$.sweep.generic_points");
    c.integer(s["flagged_points"], "$.sweep.flagged_points");
    c.boolean(s["all_generic_odd"], "$.sweep.all_generic_odd");
    c.each(s["points"], "$.sweep.points", [&](const json& pt, const std::string& p) { check_sweep_point(c, pt, p); });
  }
  c.each(j["events"], "$.events", [&](const json& e, const std::string& p) {
    if (c.object(e, p, {"kind", "detail"}, {})) {
      c.string(e["kind"], p + ".kind");
      c.string(e["detail"], p + ".detail");
    }
  });
  if (j.contains("wall_clock_seconds")) c.number(j["wall_clock_seconds"], "$.wall_clock_seconds");
  return errors;
}

ResultDocument result_from_json(const json& j) {
  const auto errors = validate_result_json(j);
  if (!errors.empty()) throw std::invalid_argument("result document: " + errors.front());
  ResultDocument doc;
  doc.schema = j["schema"];
  doc.solver_version = j["solver_version"];
  doc.command = j["command"];
  doc.seed = j["seed"];
  doc.config = j["config"];
  doc.status = j["status"];
  if (j.contains("curve")) {
    doc.curve = CurveEcho{j["curve"]["cos"].get<std::vector<double>>(), j["curve"]["sin"].get<std::vector<double>>()};
  }
  if (j.contains("field")) {
    FieldEcho f;
    f.even_only = j["field"]["even_only"];
    for (const auto& t : j["field"]["terms"]) f.terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
    doc.field = f;
  }
  if (j.contains("radius")) doc.radius = j["radius"].get<double>();
  for (const auto& s : j["squares"]) {
    SquareRecord r;
    for (int i = 0; i < 4; ++i) r.vertices[i] = read_array<2>(s["vertices"][i]);
    r.x = s["x"];
    r.t = read_array<4>(s["t"]);
    r.side = s["side"];
    r.sigma_min = s["sigma_min"];
    r.residual_norm = s["residual_norm"];
    doc.squares.push_back(r);
  }
  for (const auto& t : j["tables"]) {
    TableRecord r;
    r.x = read_array<3>(t["x"]);
    r.a = t["a"];
    r.phi = t["phi"];
    for (int i = 0; i < 4; ++i) r.points[i] = read_array<3>(t["points"][i]);
    r.value_spread = t["value_spread"];
    if (t.contains("center_norm")) r.center_norm = t["center_norm"].get<double>();
    doc.tables.push_back(r);
  }
  if (j.contains("parity")) doc.parity = ParityRecord{j["parity"]["count"], j["parity"]["parity"]};
  if (j.contains("continuation")) {
    const json& k = j["continuation"];
    ContinuationRecord c;
    c.steps = k["steps"];
    c.samples = k["samples"];
    c.rejected_steps = k["rejected_steps"];
    c.min_sigma = k["min_sigma"];
    for (const auto& f : k["folds"]) {
      c.folds.push_back({f["s"], f["direction"], f["sigma_min"], f["x"], read_array<4>(f["t"])});
    }
    doc.continuation = c;
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    SweepRecord r;
    r.rows = s["rows"];
    r.generic_points = s["generic_points"];
    r.flagged_points = s["flagged_points"];
    r.all_generic_odd = s["all_generic_odd"];
    for (const auto& p : s["points"]) {
      r.points.push_back({read_array<3>(p["x"]), p["count"], p["parity"], p["status"]});
    }
    doc.sweep = r;
  }
  for (const auto& e : j["events"]) doc.events.push_back({e["kind"], e["detail"]});
  if (j.contains("wall_clock_seconds")) doc.wall_clock_seconds = j["wall_clock_seconds"].get<double>();
  return doc;
}

std::string serialize(const ResultDocument& doc) { return to_json(doc).dump(2) + "\n"; }

json config_echo(const RunConfig& cfg) {
  json j;
  j["command"] = command_name(cfg.command);
  if (cfg.curve) {
    const auto& c = *cfg.curve;
    switch (c.kind) {
      case CurveSpec::Kind::Ellipse: j["curve"] = {{"preset", "ellipse"}}; break;
      case CurveSpec::Kind::Random:
        j["curve"] = {{"random", {{"degree", c.random_degree}, {"rho", c.random_rho}}}};
        break;
      case CurveSpec::Kind::Coefficients: j["curve"] = {{"cos", c.cos_coeffs}, {"sin", c.sin_coeffs}}; break;
    }
  }
  if (cfg.field) {
    json terms = json::array();
    for (const auto& t : cfg.field->terms) terms.push_back({t.degree, t.order, t.coeff});
    j["field"] = {{"even_only", cfg.field->even_only}, {"terms", terms}};
  }
  if (cfg.radius) j["radius"] = *cfg.radius;
  const auto& s = cfg.solver;
  j["solver"] = {{"grid_density", s.grid_density},   {"simplex_density", s.simplex_density},
                 {"newton_tol", s.newton_tol},       {"newton_max_iter", s.newton_max_iter},
                 {"dedupe_tol", s.dedupe_tol},       {"genericity_floor", s.genericity_floor}};
  if (!is_peg_command(cfg.command)) {
    const auto& t = cfg.table;
    j["table"] = {{"base_seeds", t.base_seeds},   {"phi_seeds", t.phi_seeds},
                  {"newton_tol", t.newton_tol},   {"newton_max_iter", t.newton_max_iter},
                  {"dedupe_tol", t.dedupe_tol},   {"genericity_floor", t.genericity_floor},
                  {"sweep_rows", t.sweep_rows},   {"center_tol", t.center_tol}};
  }
  if (cfg.command == Command::PegContinue) j["continuation"] = {{"steps", cfg.continuation_steps}};
  if (cfg.command == Command::FiberParity) j["sweep"] = {{"rows", cfg.sweep_rows}};
  j["seed"] = cfg.seed;
  return j;
}

SquareRecord square_record(const SquareSolution& s) {
  SquareRecord r;
  for (int i = 0; i < 4; ++i) r.vertices[i] = {s.vertices(0, i), s.vertices(1, i)};
  r.x = s.param.x;
  for (int i = 0; i < 4; ++i) r.t[i] = s.param.t(i);
  r.side = s.side;
  r.sigma_min = s.jacobian_sigma_min;
  r.residual_norm = s.residual_norm;
  return r;
}

TableRecord table_record(const TableSolution& t) {
  TableRecord r;
  r.x = {t.x[0], t.x[1], t.x[2]};
  r.a = t.a;
  r.phi = t.phi;
  for (int i = 0; i < 4; ++i) r.points[i] = {t.points(0, i), t.points(1, i), t.points(2, i)};
  r.value_spread = t.value_spread;
  r.center_norm = t.center_norm;
  return r;
}

}  // namespace starpeg::cli
