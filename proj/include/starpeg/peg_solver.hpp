#ifndef STARPEG_PEG_SOLVER_HPP
#define STARPEG_PEG_SOLVER_HPP

#include <optional>
#include <vector>

#include "starpeg/radial_curve.hpp"
#include "starpeg/square_space.hpp"

namespace starpeg {

struct SolveConfig {
  int grid_density = 16;     // base-angle seeds
  int simplex_density = 8;   // barycentric subdivisions per simplex coordinate
  double newton_tol = 1e-12; // residual norm, relative to the curve's mean radius squared
  int newton_max_iter = 60;
  double dedupe_tol = 1e-5;  // orbit distance in (x, t) coordinates
  double genericity_floor = 1e-8;

  void validate() const;
};

struct SquareSolution {
  QuadVertices<double> vertices;  // in the canonical parameter's order
  QuadParamd param;               // Z₄-canonical
  double side = 0;
  double jacobian_sigma_min = 0;  // of the normalized residual Jacobian
  double residual_norm = 0;
};

struct PegResult {
  std::vector<SquareSolution> squares;
  // A continuum of roots was detected; `squares` then holds one representative.
  bool degenerate_family = false;
};

struct NewtonTrace {
  std::vector<double> residual_norms;
  std::vector<Vector4<double>> iterates;
};

// Damped Newton from a single seed. Returns nothing when the iteration fails
// to converge or leaves the open simplex.
std::optional<SquareSolution> refine_square(const RadialFunctiond& h, const QuadParamd& seed,
                                            const SolveConfig& cfg = {},
                                            NewtonTrace* trace = nullptr);

// Deterministic multi-start seeds over S¹ × {t > 0, Σt = 2}.
std::vector<QuadParamd> seed_grid(const SolveConfig& cfg);

/// All graceful squares reachable from the seed grid, deduplicated under Z₄
/// and sorted by canonical parameter. Throws SolverCoverageFailure when the
/// search comes back empty.
PegResult find_graceful_squares(const RadialFunctiond& h, const SolveConfig& cfg = {});

struct ParityResult {
  int count = 0;
  int parity = 0;
};

// Throws GenericityFailure when a root is degenerate (σ_min below the floor)
// or the curve carries a continuum of squares.
ParityResult parity(const RadialFunctiond& h, const SolveConfig& cfg = {});
ParityResult parity_of(const PegResult& result, const SolveConfig& cfg);

struct ContinuationSample {
  double s = 0;
  QuadParamd param;  // tracked (not canonicalized) parameter
  double sigma_min = 0;
};

struct FoldEvent {
  double s = 0;
  int direction = 0;  // sign of ds/dλ after the turning point
  double sigma_min = 0;
  QuadParamd param;
};

struct ContinuationTrace {
  std::vector<ContinuationSample> samples;
  std::vector<FoldEvent> folds;
  SquareSolution endpoint;
  int rejected_steps = 0;
};

/// Tracks the ellipse's unique graceful square along h_s = (1−s)·g + s·h,
/// g the ellipse v₁² + 2v₂² = 1 (both ends normalized to unit mean radius),
/// with pseudo-arclength predictor/corrector steps so the branch is followed
/// through turning points. `steps` sets the nominal arclength step 1/steps.
ContinuationTrace continue_from_ellipse(const RadialFunctiond& h_target, const SolveConfig& cfg = {},
                                        int steps = 100);

}  // namespace starpeg

#endif  // STARPEG_PEG_SOLVER_HPP
