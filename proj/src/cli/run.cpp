#include "starpeg/cli/run.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include "starpeg/cli/svg.hpp"
#include "starpeg/errors.hpp"

namespace starpeg::cli {
namespace {

CurveEcho curve_echo(const RadialFunctiond& h) {
  CurveEcho c;
  c.cos_coeffs.assign(h.cos_coeffs().data(), h.cos_coeffs().data() + h.cos_coeffs().size());
  c.sin_coeffs.assign(h.sin_coeffs().data(), h.sin_coeffs().data() + h.sin_coeffs().size());
  return c;
}

void record_squares(ResultDocument& doc, const PegResult& result) {
  for (const auto& s : result.squares) doc.squares.push_back(square_record(s));
  if (result.degenerate_family) {
    doc.status = "degenerate_family";
    doc.events.push_back({"DegenerateFamily", "curve carries a continuum of inscribed squares; one representative reported"});
  }
}

void run_peg(const RunConfig& cfg, ResultDocument& doc) {
  const RadialFunctiond h = resolve_curve(*cfg.curve, cfg.seed);
  doc.curve = curve_echo(h);
  switch (cfg.command) {
    case Command::PegFind:
      record_squares(doc, find_graceful_squares(h, cfg.solver));
      break;
    case Command::PegParity: {
      const PegResult result = find_graceful_squares(h, cfg.solver);
      record_squares(doc, result);
      try {
        const ParityResult p = parity_of(result, cfg.solver);
        doc.parity = ParityRecord{p.count, p.parity};
      } catch (const GenericityFailure& e) {
        if (!e.degenerate_family()) {
          doc.status = "genericity_failure";
          doc.events.push_back({"GenericityFailure", e.what()});
        }
      }
      break;
    }
    case Command::PegContinue: {
      const ContinuationTrace trace = continue_from_ellipse(h, cfg.solver, cfg.continuation_steps);
      doc.squares.push_back(square_record(trace.endpoint));
      ContinuationRecord rec;
      rec.steps = cfg.continuation_steps;
      rec.samples = static_cast<int>(trace.samples.size());
      rec.rejected_steps = trace.rejected_steps;
      rec.min_sigma = trace.samples.empty() ? 0.0 : trace.samples.front().sigma_min;
      for (const auto& s : trace.samples) rec.min_sigma = std::min(rec.min_sigma, s.sigma_min);
      for (const auto& f : trace.folds) {
        rec.folds.push_back({f.s, f.direction, f.sigma_min, f.param.x, {f.param.t(0), f.param.t(1), f.param.t(2), f.param.t(3)}});
        doc.events.push_back({"Fold", "turning point at s = " + std::to_string(f.s)});
      }
      doc.continuation = rec;
      break;
    }
    default:
      break;
  }
}

void run_table(const RunConfig& cfg, ResultDocument& doc) {
  const ScalarField f = resolve_field(*cfg.field);
  const double a = *cfg.radius;
  doc.field = FieldEcho{f.terms(), f.even_only()};
  doc.radius = a;
  switch (cfg.command) {
    case Command::TableFind: {
      const TableSearchResult r = find_tables_direct(f, a, cfg.table);
      for (const auto& t : r.tables) doc.tables.push_back(table_record(t));
      if (r.degenerate_family) {
        doc.status = "degenerate_family";
        doc.events.push_back({"DegenerateFamily", "tables form a continuum at this radius; one representative reported"});
      }
      break;
    }
    case Command::TableCenter: {
      const CenterRouteResult r = find_tables_via_center(f, a, cfg.table);
      for (const auto& t : r.tables) doc.tables.push_back(table_record(t));
      for (const auto& e : r.events) doc.events.push_back({e.kind, e.detail});
      if (r.degenerate_family) {
        doc.status = "degenerate_family";
        doc.events.push_back({"DegenerateFamily", "fiber squares degenerate on every sweep cell; one representative reported"});
      }
      break;
    }
    case Command::FiberParity: {
      const ParitySweepReport r = fiber_parity_sweep(f, a, cfg.sweep_rows, cfg.solver);
      SweepRecord rec;
      rec.rows = cfg.sweep_rows;
      rec.generic_points = r.generic_points;
      rec.flagged_points = r.flagged_points;
      rec.all_generic_odd = r.all_generic_odd;
      for (const auto& p : r.points) rec.points.push_back({{p.x[0], p.x[1], p.x[2]}, p.count, p.parity, p.status});
      doc.sweep = rec;
      break;
    }
    default:
      break;
  }
}

}  // namespace

RunOutcome execute(const RunConfig& cfg, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  ResultDocument doc;
  doc.command = command_name(cfg.command);
  doc.seed = cfg.seed;
  doc.config = config_echo(cfg);
  try {
    if (is_peg_command(cfg.command)) {
      run_peg(cfg, doc);
    } else {
      run_table(cfg, doc);
    }
  } catch (const SolverCoverageFailure& e) {
    doc.status = "solver_coverage_failure";
    doc.events.push_back({"SolverCoverageFailure", e.what()});
    outcome.exit_code = kExitSolverFailure;
    outcome.message = e.what();
  } catch (const TrackingLoss& e) {
    doc.status = "tracking_loss";
    doc.events.push_back({"TrackingLoss", e.what()});
    outcome.exit_code = kExitSolverFailure;
    outcome.message = e.what();
  } catch (const FitFailure& e) {
    doc.status = "fit_failure";
    doc.events.push_back({"FitFailure", e.what()});
    outcome.exit_code = kExitSolverFailure;
    outcome.message = e.what();
  } catch (const InvalidInput& e) {
    return {kExitInputError, std::nullopt, e.what()};
  } catch (const InjectivityRadiusExceeded& e) {
    return {kExitInputError, std::nullopt, e.what()};
  } catch (const PositivityLost& e) {
    return {kExitInputError, std::nullopt, e.what()};
  } catch (const EvennessRequired& e) {
    return {kExitInputError, std::nullopt, e.what()};
  }
  if (timing) {
    doc.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  outcome.document = std::move(doc);
  return outcome;
}

int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const auto command = parse_command(opts.command);
  if (!command) {
    err << "error: unknown command '" << opts.command << "'\n";
    return kExitInputError;
  }
  RunConfig cfg;
  try {
    cfg = load_run_config(opts.config_path, *command);
  } catch (const ConfigError& e) {
    err << "error: " << opts.config_path << ": " << e.what() << "\n";
    return kExitInputError;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_path) cfg.result_path = opts.out_path;
  if (opts.svg_path) cfg.svg_path = opts.svg_path;

  const RunOutcome outcome = execute(cfg, opts.timing);
  if (!outcome.document) {
    err << "error: " << outcome.message << "\n";
    return outcome.exit_code;
  }
  const std::string text = serialize(*outcome.document);
  try {
    if (cfg.result_path) {
      std::ofstream f(*cfg.result_path, std::ios::binary);
      if (!f || !(f << text)) throw std::runtime_error("cannot write result document '" + *cfg.result_path + "'");
    } else {
      out << text;
    }
    if (cfg.svg_path) emit_svg(*outcome.document, *cfg.svg_path);
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (outcome.exit_code != kExitOk) err << "solver failure: " << outcome.message << "\n";
  return outcome.exit_code;
}

}  // namespace starpeg::cli
