// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "starpeg/cli/config.hpp"
#include "starpeg/cli/report.hpp"
#include "starpeg/cli/run.hpp"
#include "starpeg/cli/svg.hpp"
#include "starpeg/errors.hpp"
#include "starpeg/peg_solver.hpp"
#include "starpeg/table_solver.hpp"

using namespace starpeg;
using fixtures::kPi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> body;
};

Outcome fail(const std::string& why) { return {false, why}; }

double nearest(const TablePoints& p, const std::vector<TableSolution>& set) {
  double best = 1e300;
  for (const auto& s : set) best = std::min(best, point_set_distance(p, s.points));
  return best;
}

Outcome ellipse_uniqueness() {
  const PegResult r = find_graceful_squares(fixtures::ellipse());
  if (r.squares.size() != 1) return fail(fmt::format("{} squares", r.squares.size()));
  double worst = 0;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 2; ++k) {
      worst = std::max(worst, std::abs(std::abs(r.squares[0].vertices(k, i)) - fixtures::kInvSqrt3));
    }
  }
  if (worst >= 1e-8) return fail(fmt::format("vertex error {:.2e}", worst));
  return {true, fmt::format("1 square, vertex error {:.1e}", worst)};
}

Outcome parity_law() {
  int generic = 0, flagged = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const RadialFunctiond h = random_radial(seed, 8, 0.6);
    if (validate_positive(h, 0.0).certified_min <= 0.2) return fail(fmt::format("seed {} has min h <= 0.2", seed));
    try {
      const ParityResult p = parity(h);
      if (p.parity != 1) return fail(fmt::format("seed {}: parity {} with {} squares", seed, p.parity, p.count));
      ++generic;
      if (seed < 5) {
        const auto roots = oracle::brute_force_squares(fixtures::to_oracle(h), 48);
        if (int(roots.size()) != p.count) {
          return fail(fmt::format("seed {}: solver {} vs oracle {}", seed, p.count, roots.size()));
        }
      }
    } catch (const GenericityFailure&) {
      ++flagged;
      if (seed < 5) return fail(fmt::format("oracle seed {} is not generic", seed));
    }
  }
  return {true, fmt::format("{} generic curves with parity 1, {} flagged, oracle counts match on 5", generic, flagged)};
}

Outcome continuation_consistency() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RadialFunctiond h = random_radial(seed, 8, 0.6);
    const ContinuationTrace t = continue_from_ellipse(h);
    const PegResult r = find_graceful_squares(h);
    double best = 1e300;
    for (const auto& s : r.squares) best = std::min(best, orbit_distance(s.param, t.endpoint.param));
    if (best >= 1e-6) return fail(fmt::format("seed {}: endpoint {:.2e} from every root", seed, best));
    worst = std::max(worst, best);
  }
  return {true, fmt::format("10 endpoints matched, worst {:.1e}", worst)};
}

Outcome great_circle() {
  for (int w = 0; w < 5; ++w) {
    const TableSearchResult r = find_tables_direct(fixtures::great_circle_field(w), kPi / 2);
    if (r.tables.empty()) return fail(fmt::format("field {}: no table", w));
    for (const auto& t : r.tables) {
      if (t.value_spread >= 1e-8) return fail(fmt::format("field {}: spread {:.2e}", w, t.value_spread));
    }
  }
  return {true, "5 fields, every table within 1e-8"};
}

Outcome even_tables() {
  int total = 0;
  for (int w = 0; w < 3; ++w) {
    const ScalarField f = fixtures::even_field(w);
    for (double a : fixtures::kRadii) {
      const TableSearchResult r = find_tables_direct(f, a);
      if (r.tables.empty()) return fail(fmt::format("field {} a={:.4f}: no table", w, a));
      for (const auto& t : r.tables) {
        if (t.value_spread >= 1e-8) return fail(fmt::format("field {} a={:.4f}: spread {:.2e}", w, a, t.value_spread));
        const TableSolution c = antipodal_transport(f, t);
        if (c.value_spread >= 1e-8 || nearest(c.points, r.tables) >= 1e-8) {
          return fail(fmt::format("field {} a={:.4f}: companion missing", w, a));
        }
      }
      total += int(r.tables.size());
    }
  }
  return {true, fmt::format("{} tables over 15 cases, all companions present", total)};
}

// Center-route results shared by criteria 6 and 8.
struct CenterCase {
  int field;
  double a;
  CenterRouteResult center;
  TableSearchResult direct;
};

std::vector<CenterCase>& center_cases() {
  static std::vector<CenterCase> cases = [] {
    std::vector<CenterCase> out;
    for (int w = 0; w < 3; ++w) {
      const ScalarField f = fixtures::even_field(w);
      for (double a : fixtures::kRadii) out.push_back({w, a, find_tables_via_center(f, a), find_tables_direct(f, a)});
    }
    return out;
  }();
  return cases;
}

Outcome table_certificate() {
  int checked = 0, failures = 0;
  double worst_defect = 0;
  std::vector<ScalarField> fp;
  for (int w = 0; w < 3; ++w) fp.push_back(positivity_shift(fixtures::even_field(w)));
  for (const auto& c : center_cases()) {
    failures += c.center.certificate_failures();
    for (const auto& t : c.center.tables) {
      if (!t.center_norm || *t.center_norm > 1e-8) continue;
      ++checked;
      if (t.value_spread > 1e-6) return fail(fmt::format("spread {:.2e} at center {:.1e}", t.value_spread, *t.center_norm));
      // Re-solve the fiber at the base point: the centered square's vertex
      // directions must be a quarter turn apart.
      const FiberSquares fs = fiber_graceful_squares(fp[c.field], t.x, c.a);
      const FiberSquare* best = nullptr;
      for (const auto& sq : fs.squares) {
        if (!best || sq.center.norm() < best->center.norm()) best = &sq;
      }
      if (!best || best->center.norm() > 1e-8) return fail("no centered fiber square at a certified table");
      double defect = 0;
      for (int i = 0; i < 4; ++i) defect = std::max(defect, std::abs(kPi * best->square.param.t(i) - kPi / 2));
      if (defect > 1e-8) return fail(fmt::format("fiber square directions off by {:.2e}", defect));
      worst_defect = std::max(worst_defect, defect);
    }
  }
  if (failures > 0) return fail(fmt::format("{} CertificateFailure events", failures));
  return {true, fmt::format("{} certified tables, direction defect {:.1e}, 0 CertificateFailure events", checked, worst_defect)};
}

Outcome fiber_sweep() {
  const ParitySweepReport rep = fiber_parity_sweep(fixtures::even_field(0), kPi / 6, 12);
  if (rep.points.size() != 288) return fail(fmt::format("{} grid points", rep.points.size()));
  for (const auto& p : rep.points) {
    if (p.generic && p.parity != 1) return fail(fmt::format("even count {} at a generic point", p.count));
  }
  const double flagged = double(rep.flagged_points) / rep.points.size();
  if (flagged >= 0.05) return fail(fmt::format("{:.1f}% flagged", 100 * flagged));
  return {true, fmt::format("{} generic points, all odd; {} flagged", rep.generic_points, rep.flagged_points)};
}

Outcome cross_route() {
  int compared = 0;
  for (const auto& c : center_cases()) {
    const auto& d = c.direct.tables;
    const auto& z = c.center.tables;
    for (const auto& t : d) {
      if (nearest(t.points, z) >= 1e-5) return fail(fmt::format("field {} a={:.4f}: direct table missing from center route", c.field, c.a));
    }
    for (const auto& t : z) {
      if (nearest(t.points, d) >= 1e-5) return fail(fmt::format("field {} a={:.4f}: center table missing from direct route", c.field, c.a));
    }
    compared += int(d.size());
  }
  return {true, fmt::format("{} tables agree over 15 cases", compared)};
}

Outcome numerical_hygiene() {
  std::mt19937_64 rng(17);
  const double eps = 1e-6;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto h = random_radial(i, 8, 0.6);
    Vector4<double> w;
    for (int k = 0; k < 4; ++k) w(k) = 0.2 + unit_uniform(rng);
    QuadParamd p;
    p.x = 2 * kPi * unit_uniform(rng);
    p.t = 2 * w / w.sum();
    const Matrix4<double> J = residual_jacobian(h, p);
    for (int k = 0; k < 4; ++k) {
      Vector4<double> dz = Vector4<double>::Zero();
      dz(k) = eps;
      const Vector4<double> fd = (square_residual(h, QuadParamd::from_reduced(p.reduced() + dz)) -
                                  square_residual(h, QuadParamd::from_reduced(p.reduced() - dz))) /
                                 (2 * eps);
      worst = std::max(worst, (J.col(k) - fd).cwiseAbs().maxCoeff());
    }
  }
  if (worst >= 1e-5) return fail(fmt::format("Jacobian error {:.2e}", worst));

  NewtonTrace trace;
  QuadParamd seed;
  seed.x = kPi / 4 + 0.08;
  seed.t << 0.56, 0.47, 0.52, 0.45;
  if (!refine_square(fixtures::ellipse(), seed, {}, &trace)) return fail("Newton did not converge");
  const auto& r = trace.residual_norms;
  int quadratic = 0;
  double ratio = 0;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    if (r[k] < 1e-1 && r[k + 1] > 1e-14) {
      ratio = std::max(ratio, r[k + 1] / (r[k] * r[k]));
      ++quadratic;
    }
  }
  if (quadratic < 2 || ratio > 10) return fail(fmt::format("{} steps, ratio {:.2e}", quadratic, ratio));
  return {true, fmt::format("Jacobian error {:.1e}; {} quadratic steps, max r(k+1)/r(k)^2 = {:.2f}", worst, quadratic, ratio)};
}

Outcome determinism() {
  struct Case {
    cli::Command command;
    const char* config;
  };
  const Case cases[] = {{cli::Command::PegFind, "random.yaml"},     {cli::Command::PegParity, "random.yaml"},
                        {cli::Command::PegContinue, "continue.yaml"}, {cli::Command::TableFind, "even_field.yaml"},
                        {cli::Command::TableCenter, "even_field.yaml"}, {cli::Command::FiberParity, "even_field.yaml"}};
  for (const auto& c : cases) {
    const auto cfg = cli::load_run_config(std::string(STARPEG_CONFIG_DIR) + "/" + c.config, c.command);
    const cli::RunOutcome a = cli::execute(cfg), b = cli::execute(cfg);
    if (!a.document || !b.document) return fail(fmt::format("{}: no document", cli::command_name(c.command)));
    if (cli::serialize(*a.document) != cli::serialize(*b.document) ||
        cli::render_svg(*a.document) != cli::render_svg(*b.document)) {
      return fail(fmt::format("{}: outputs differ", cli::command_name(c.command)));
    }
  }
  return {true, "6 commands byte-identical (JSON and SVG)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "ellipse uniqueness", 1, ellipse_uniqueness},
      {2, "parity law", 300, parity_law},
      {3, "continuation consistency", 120, continuation_consistency},
      {4, "great-circle tables", 60, great_circle},
      {5, "even-field tables and companions", 300, even_tables},
      {6, "table certificate", 0, table_certificate},
      {7, "fiber parity sweep", 600, fiber_sweep},
      {8, "cross-route agreement", 0, cross_route},
      {9, "numerical hygiene", 0, numerical_hygiene},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && c.budget_seconds > 0 && seconds >= c.budget_seconds) {
      o = fail(fmt::format("{} (over the {:.0f} s budget)", o.detail, c.budget_seconds));
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2d %-34s %s  %8.2fs  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
