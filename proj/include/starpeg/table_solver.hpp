#ifndef STARPEG_TABLE_SOLVER_HPP
#define STARPEG_TABLE_SOLVER_HPP

#include <string>
#include <vector>

#include "starpeg/peg_solver.hpp"
#include "starpeg/sphere_geometry.hpp"

namespace starpeg {

struct TableConfig {
  int base_seeds = 96;         // Fibonacci base points for the direct solver
  int phi_seeds = 3;           // frame angles per base point in [0, π/2)
  double newton_tol = 1e-13;   // table residual norm, field units
  int newton_max_iter = 40;
  double dedupe_tol = 1e-6;    // Hausdorff distance between 4-point sets
  double genericity_floor = 1e-7;
  double fd_step = 1e-6;       // central differences for the direct Jacobian
  int sweep_rows = 8;          // center route grid: rows × 2·rows base points
  double center_tol = 1e-11;   // center-map norm accepted as zero
  double certificate_tol = 1e-6;
  double square_tol = 1e-8;    // tangent directions must be a square to this
  SolveConfig peg;             // fiber peg solves

  void validate() const;
};

// (f(p1) − f(p2), f(p2) − f(p3), f(p3) − f(p4)) at table_points(x, a, φ).
Vector3d table_residual(const ScalarField& f, const SpherePoint& x, double a, double phi);

struct TableSearchResult {
  std::vector<TableSolution> tables;
  // Every seed converged onto a continuum; `tables` holds one representative.
  bool degenerate_family = false;
};

/// Multi-start damped Newton on (chart coordinates of x, φ). Solutions are
/// deduplicated as 4-point sets; for even fields each antipodal companion is
/// added. Throws SolverCoverageFailure when nothing converges.
TableSearchResult find_tables_direct(const ScalarField& f, double a, const TableConfig& cfg = {});

struct FiberCurve {
  SpherePoint x;
  double a = 0;
  TangentFrame frame;
  RadialFunctiond radial;  // θ ↦ a·f(exp(x, a(cos θ e1 + sin θ e2)))
  double fit_residual = 0;
};

// Throws FitFailure if the fit misses 1e-9 at degree 64, InvalidInput when
// the field is not positive on the geodesic circle.
FiberCurve fiber_curve_at(const ScalarField& f, const SpherePoint& x, double a);
FiberCurve fiber_curve_at(const ScalarField& f, const SpherePoint& x, const TangentFrame& frame,
                          double a);

struct FiberSquare {
  SquareSolution square;
  Eigen::Vector2d center;  // mean of the vertices, frame coordinates
};

struct FiberSquares {
  FiberCurve fiber;
  std::vector<FiberSquare> squares;
  bool degenerate_family = false;
};

FiberSquares fiber_graceful_squares(const ScalarField& f, const SpherePoint& x, double a,
                                    const SolveConfig& cfg = {});

struct RouteEvent {
  std::string kind;  // "CertificateFailure", "FiberFailure"
  std::string detail;
};

struct CenterRouteResult {
  std::vector<TableSolution> tables;
  std::vector<RouteEvent> events;
  bool degenerate_family = false;
  int certificate_failures() const;
};

/// Tables as zeros of the center map of graceful fiber squares. Every fiber
/// square on a sphere grid seeds a joint Newton solve over the base point and
/// the square parameters (square residual plus center); zeros that cluster
/// closer than the grid spacing get extra ring seeds. Each accepted zero is
/// checked against the Table Lemma certificate.
CenterRouteResult find_tables_via_center(const ScalarField& f, double a, const TableConfig& cfg = {});

struct SweepPoint {
  SpherePoint x;
  int count = 0;
  int parity = 0;
  bool generic = false;
  std::string status;  // "ok", "GenericityFailure", "DegenerateFamily", "SolverCoverageFailure", "FitFailure"
};

struct ParitySweepReport {
  std::vector<SweepPoint> points;
  int generic_points = 0;
  int flagged_points = 0;
  bool all_generic_odd = true;
};

// Counts graceful squares of the fiber curve over a rows × 2·rows grid.
ParitySweepReport fiber_parity_sweep(const ScalarField& f, double a, int rows,
                                     const SolveConfig& cfg = {});

// Sphere grid used by the sweeps: colatitudes π(i + ½)/rows, longitudes 2πj/(2·rows),
// in serpentine order.
std::vector<SpherePoint> sweep_grid(int rows);

// f + 1 + |min over samples of f|.
ScalarField positivity_shift(const ScalarField& f);

}  // namespace starpeg

#endif  // STARPEG_TABLE_SOLVER_HPP
