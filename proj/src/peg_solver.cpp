#include "starpeg/peg_solver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "starpeg/errors.hpp"

namespace starpeg {
namespace {

using Vec4 = Vector4<double>;
using Mat4 = Matrix4<double>;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat45 = Eigen::Matrix<double, 4, 5>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

constexpr double kPi = std::numbers::pi;
constexpr double kSimplexFloor = 1e-9;
constexpr double kMaxNewtonStep = 0.5;
constexpr int kFamilyWitnesses = 8;

// Squares are invariant under scaling, so every solve runs on h / mean(h).
RadialFunctiond normalized(const RadialFunctiond& h) {
  const double mean = h.cos_coeffs()(0);
  if (!(mean > 0)) throw InvalidInput("radial function must have positive mean");
  if (!validate_positive(h, 0.0).positive) {
    throw InvalidInput("radial function is not certifiably positive");
  }
  return scaled(h, 1.0 / mean);
}

double sigma_min_of(const Mat4& J) {
  Eigen::JacobiSVD<Mat4> svd(J);
  return svd.singularValues()(3);
}

struct NewtonOutcome {
  Vec4 z;
  double residual = 0;
  bool converged = false;
};

// Newton with a trust cap and backtracking; JacobiSVD::solve yields the
// minimum-norm step when J is singular.
NewtonOutcome newton(const RadialFunctiond& hn, Vec4 z, const SolveConfig& cfg,
                     NewtonTrace* trace) {
  NewtonOutcome out;
  auto param = [](const Vec4& v) { return QuadParamd::from_reduced(v); };
  Vec4 r = square_residual(hn, param(z));
  double rn = r.norm();
  for (int it = 0; it <= cfg.newton_max_iter; ++it) {
    if (trace) {
      trace->residual_norms.push_back(rn);
      trace->iterates.push_back(z);
    }
    if (!std::isfinite(rn)) break;
    if (rn < cfg.newton_tol) {
      out.converged = true;
      break;
    }
    if (it == cfg.newton_max_iter) break;
    const Mat4 J = residual_jacobian(hn, param(z));
    Eigen::JacobiSVD<Mat4> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec4 step = svd.solve(-r);
    if (!step.allFinite()) break;
    if (step.norm() > kMaxNewtonStep) step *= kMaxNewtonStep / step.norm();
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      const Vec4 trial = z + lambda * step;
      const QuadParamd p = param(trial);
      if (!p.is_valid(kSimplexFloor)) continue;
      const Vec4 rt = square_residual(hn, p);
      const double rtn = rt.norm();
      if (rtn < (1.0 - 1e-4 * lambda) * rn || rtn < cfg.newton_tol) {
        z = trial;
        r = rt;
        rn = rtn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.z = z;
  out.residual = rn;
  return out;
}

SquareSolution make_solution(const RadialFunctiond& h, const RadialFunctiond& hn,
                             const QuadParamd& tracked, double residual) {
  SquareSolution sol;
  QuadParamd p = tracked;
  p.x = reduce_angle(p.x);
  sol.jacobian_sigma_min = sigma_min_of(residual_jacobian(hn, p));
  sol.param = z4_canonical(p);
  sol.vertices = quad_vertices(h, sol.param);
  double side = 0;
  for (int i = 0; i < 4; ++i) side += (sol.vertices.col((i + 1) % 4) - sol.vertices.col(i)).norm();
  sol.side = side / 4;
  sol.residual_norm = residual;
  return sol;
}

bool acceptable_root(const SquareSolution& s, const SolveConfig& cfg) {
  return s.param.is_valid(1e-6) && s.side > cfg.dedupe_tol;
}

// Follows the null direction of a degenerate root. Returns true when at least
// kFamilyWitnesses mutually distant degenerate roots are reached, i.e. the
// root lies on a continuum rather than being an isolated degenerate zero.
bool probe_family(const RadialFunctiond& hn, const QuadParamd& root, const SolveConfig& cfg) {
  std::vector<Vec4> witnesses{root.reduced()};
  Vec4 z = root.reduced();
  Vec4 direction = Vec4::Zero();
  const double stride = 0.05;
  for (int k = 0; k < 4 * kFamilyWitnesses && static_cast<int>(witnesses.size()) < kFamilyWitnesses;
       ++k) {
    const Mat4 J = residual_jacobian(hn, QuadParamd::from_reduced(z));
    Eigen::JacobiSVD<Mat4> svd(J, Eigen::ComputeFullV);
    if (svd.singularValues()(3) >= cfg.genericity_floor) return false;
    Vec4 n = svd.matrixV().col(3);
    if (direction.dot(n) < 0) n = -n;
    direction = n;
    SolveConfig relaxed = cfg;
    relaxed.newton_max_iter = 20;
    const NewtonOutcome o = newton(hn, z + stride * n, relaxed, nullptr);
    if (!o.converged) return false;
    if ((o.z - z).norm() < 0.25 * stride) return false;
    z = o.z;
    bool distant = true;
    for (const auto& w : witnesses) distant = distant && (w - z).norm() > 10 * cfg.dedupe_tol;
    if (distant) witnesses.push_back(z);
  }
  return static_cast<int>(witnesses.size()) >= kFamilyWitnesses;
}

}  // namespace

void SolveConfig::validate() const {
  if (grid_density < 1 || simplex_density < 4 || newton_max_iter < 1 || !(newton_tol > 0) ||
      !(dedupe_tol > 0) || !(genericity_floor > 0)) {
    throw InvalidInput("solver configuration values must be positive (simplex_density >= 4)");
  }
}

std::optional<SquareSolution> refine_square(const RadialFunctiond& h, const QuadParamd& seed,
                                            const SolveConfig& cfg, NewtonTrace* trace) {
  const RadialFunctiond hn = normalized(h);
  if (!seed.is_valid(0.0)) return std::nullopt;
  const NewtonOutcome o = newton(hn, seed.reduced(), cfg, trace);
  if (!o.converged) return std::nullopt;
  SquareSolution sol = make_solution(h, hn, QuadParamd::from_reduced(o.z), o.residual);
  if (!acceptable_root(sol, cfg)) return std::nullopt;
  return sol;
}

std::vector<QuadParamd> seed_grid(const SolveConfig& cfg) {
  cfg.validate();
  const int n = cfg.simplex_density;
  std::vector<Vec4> simplex;
  for (int i0 = 1; i0 < n; ++i0)
    for (int i1 = 1; i0 + i1 < n; ++i1)
      for (int i2 = 1; i0 + i1 + i2 < n; ++i2) {
        const int i3 = n - i0 - i1 - i2;
        simplex.push_back(2.0 * Vec4(i0, i1, i2, i3) / double(n));
      }
  if (n % 4 != 0) simplex.push_back(Vec4::Constant(0.5));
  std::vector<QuadParamd> seeds;
  seeds.reserve(simplex.size() * cfg.grid_density);
  for (int ix = 0; ix < cfg.grid_density; ++ix) {
    const double x = 2 * kPi * double(ix) / double(cfg.grid_density);
    for (const auto& t : simplex) seeds.push_back(QuadParamd{x, t});
  }
  return seeds;
}

PegResult find_graceful_squares(const RadialFunctiond& h, const SolveConfig& cfg) {
  cfg.validate();
  const RadialFunctiond hn = normalized(h);
  std::vector<SquareSolution> roots;
  for (const auto& seed : seed_grid(cfg)) {
    const NewtonOutcome o = newton(hn, seed.reduced(), cfg, nullptr);
    if (!o.converged) continue;
    SquareSolution sol = make_solution(h, hn, QuadParamd::from_reduced(o.z), o.residual);
    if (!acceptable_root(sol, cfg)) continue;
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const SquareSolution& r) {
      return orbit_distance(r.param, sol.param) < cfg.dedupe_tol;
    });
    if (!duplicate) roots.push_back(std::move(sol));
  }
  if (roots.empty()) {
    throw SolverCoverageFailure(
        "no graceful square found; every star-shaped C2 curve has one, so the seed grid is too coarse");
  }
  std::sort(roots.begin(), roots.end(), [](const SquareSolution& a, const SquareSolution& b) {
    for (int i = 0; i < 4; ++i) {
      if (a.param.t(i) != b.param.t(i)) return a.param.t(i) < b.param.t(i);
    }
    return a.param.x < b.param.x;
  });

  PegResult result;
  for (const auto& r : roots) {
    if (r.jacobian_sigma_min < cfg.genericity_floor && probe_family(hn, r.param, cfg)) {
      result.degenerate_family = true;
      result.squares = {r};
      return result;
    }
  }
  result.squares = std::move(roots);
  return result;
}

ParityResult parity_of(const PegResult& result, const SolveConfig& cfg) {
  const int count = static_cast<int>(result.squares.size());
  if (result.degenerate_family) {
    throw GenericityFailure("curve carries a continuum of inscribed squares", count, true);
  }
  for (const auto& s : result.squares) {
    if (s.jacobian_sigma_min < cfg.genericity_floor) {
      throw GenericityFailure("near-degenerate square (sigma_min " +
                                  std::to_string(s.jacobian_sigma_min) +
                                  "); perturb the curve",
                              count, false);
    }
  }
  return {count, count % 2};
}

ParityResult parity(const RadialFunctiond& h, const SolveConfig& cfg) {
  return parity_of(find_graceful_squares(h, cfg), cfg);
}

// ---------------------------------------------------------------------------
// Continuation

namespace {

class Homotopy {
 public:
  Homotopy(RadialFunctiond start, RadialFunctiond target)
      : start_(std::move(start)), target_(std::move(target)),
        velocity_(difference(target_, start_)) {}

  RadialFunctiond at(double s) const { return blend(start_, target_, s); }

  Vec4 residual(const Vec5& y) const {
    return square_residual(at(y(4)), QuadParamd::from_reduced(y.head<4>()));
  }

  Mat45 jacobian(const Vec5& y) const {
    const RadialFunctiond hs = at(y(4));
    const QuadParamd p = QuadParamd::from_reduced(y.head<4>());
    Mat45 J;
    J.leftCols<4>() = residual_jacobian(hs, p);
    J.col(4) = residual_radial_derivative(hs, velocity_, p);
    return J;
  }

  Vec5 tangent(const Vec5& y, const Vec5& orient) const {
    Eigen::JacobiSVD<Mat45> svd(jacobian(y), Eigen::ComputeFullV);
    Vec5 t = svd.matrixV().col(4);
    if (t.dot(orient) < 0) t = -t;
    return t;
  }

  double sigma_min(const Vec5& y) const {
    return sigma_min_of(jacobian(y).leftCols<4>());
  }

  // Newton on [H(y); τ·(y − anchor)] = 0.
  std::optional<Vec5> correct(Vec5 y, const Vec5& anchor, const Vec5& tau, double tol) const {
    for (int it = 0; it < 12; ++it) {
      const Vec4 r = residual(y);
      if (!QuadParamd::from_reduced(y.head<4>()).is_valid(kSimplexFloor)) return std::nullopt;
      Vec5 g;
      g.head<4>() = r;
      g(4) = tau.dot(y - anchor);
      if (r.norm() < tol && std::abs(g(4)) < 1e-13) return y;
      Mat5 A;
      A.topRows<4>() = jacobian(y);
      A.row(4) = tau.transpose();
      const Vec5 dy = A.colPivHouseholderQr().solve(-g);
      if (!dy.allFinite()) return std::nullopt;
      y += dy;
      if (dy.norm() < 1e-14 && residual(y).norm() < 10 * tol) return y;
    }
    if (residual(y).norm() < tol) return y;
    return std::nullopt;
  }

 private:
  RadialFunctiond start_;
  RadialFunctiond target_;
  RadialFunctiond velocity_;
};

// Locates the turning point between y_a (tangent tau_a) and the accepted
// point a step `step` further along by bisection on the sign of ds/dλ.
FoldEvent refine_fold(const Homotopy& H, const Vec5& y_a, const Vec5& tau_a, double step,
                      double tol) {
  const double sign_a = tau_a(4) > 0 ? 1.0 : -1.0;
  double lo = 0, hi = step;
  Vec5 best = y_a;
  for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec5 anchor = y_a + mid * tau_a;
    const auto y = H.correct(anchor, anchor, tau_a, tol);
    if (!y) break;
    best = *y;
    const Vec5 t = H.tangent(*y, tau_a);
    if (t(4) * sign_a > 0) lo = mid;
    else hi = mid;
  }
  FoldEvent ev;
  ev.s = best(4);
  ev.direction = sign_a > 0 ? -1 : 1;
  ev.sigma_min = H.sigma_min(best);
  ev.param = QuadParamd::from_reduced(best.head<4>());
  return ev;
}

}  // namespace

ContinuationTrace continue_from_ellipse(const RadialFunctiond& h_target, const SolveConfig& cfg,
                                        int steps) {
  cfg.validate();
  if (steps < 1) throw InvalidInput("continuation needs at least one step");
  if (!validate_positive(h_target, 0.0).positive) {
    throw InvalidInput("target radial function is not certifiably positive");
  }
  const RadialFunctiond start = normalized(ellipse_radial<double>());
  const RadialFunctiond target = normalized(h_target);
  const Homotopy H(start, target);
  // A convex combination of positive functions stays positive; the check
  // guards against certification slack on nearly vanishing targets.
  for (int k = 0; k <= 16; ++k) {
    if (!validate_positive(H.at(k / 16.0), 0.0).positive) {
      throw PositivityLost("homotopy leaves the positive cone near s = " + std::to_string(k / 16.0));
    }
  }

  // The ellipse square sits at x = π/4 with equal increments.
  const NewtonOutcome start_root = newton(start, Vec4(kPi / 4, 0.5, 0.5, 0.5), cfg, nullptr);
  if (!start_root.converged) throw TrackingLoss("could not resolve the ellipse square");
  const QuadParamd p0 = QuadParamd::from_reduced(start_root.z);

  ContinuationTrace trace;
  Vec5 y;
  y.head<4>() = p0.reduced();
  y(4) = 0;
  Vec5 e_s = Vec5::Zero();
  e_s(4) = 1;
  Vec5 tau = H.tangent(y, e_s);
  trace.samples.push_back({0.0, p0, H.sigma_min(y)});

  const double tol = cfg.newton_tol;
  const double nominal = 1.0 / steps;
  const double max_step = 4.0 * nominal;
  const double basin = 0.25;
  double step = nominal;
  const int max_points = 200000;
  while (y(4) < 1.0) {
    if (static_cast<int>(trace.samples.size()) > max_points) {
      throw TrackingLoss("continuation exceeded its step budget");
    }
    if (step < 1e-10) throw TrackingLoss("corrector diverged below the minimum step");
    const Vec5 predicted = y + step * tau;
    const auto corrected = H.correct(predicted, predicted, tau, tol);
    if (!corrected || (*corrected - predicted).norm() > std::min(basin, 0.5 * step + 1e-3)) {
      step *= 0.5;
      ++trace.rejected_steps;
      continue;
    }
    const Vec5 tau_new = H.tangent(*corrected, tau);
    if (tau_new.dot(tau) < 0.9) {
      step *= 0.5;
      ++trace.rejected_steps;
      continue;
    }
    if (tau_new(4) * tau(4) < 0) trace.folds.push_back(refine_fold(H, y, tau, step, tol));
    y = *corrected;
    tau = tau_new;
    trace.samples.push_back({y(4), QuadParamd::from_reduced(y.head<4>()), H.sigma_min(y)});
    step = std::min(max_step, step * 1.5);
  }

  // Land exactly on s = 1 by interpolating the last chord and re-solving.
  const auto& prev = trace.samples[trace.samples.size() - 2];
  const Vec4 z_prev = prev.param.reduced();
  const double w = (1.0 - prev.s) / (y(4) - prev.s);
  const Vec4 z_end = z_prev + w * (y.head<4>() - z_prev);
  NewtonOutcome landing = newton(target, z_end, cfg, nullptr);
  if (!landing.converged) throw TrackingLoss("endpoint correction at s = 1 failed");
  trace.samples.back() = {1.0, QuadParamd::from_reduced(landing.z),
                          sigma_min_of(residual_jacobian(target, QuadParamd::from_reduced(landing.z)))};
  trace.endpoint = make_solution(h_target, target, QuadParamd::from_reduced(landing.z), landing.residual);
  return trace;
}

}  // namespace starpeg
