#include "starpeg/table_solver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "starpeg/errors.hpp"

namespace starpeg {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFitTarget = 1e-9;
constexpr int kFitDegreeCap = kDefaultDegreeCap;
constexpr int kRingSeeds = 8;

void check_radius(double a) {
  if (!(a > 0) || a > kPi / 2) {
    throw InvalidInput("table radius must satisfy 0 < a <= pi/2, got " + std::to_string(a));
  }
}

// Base point moved by chart coordinates u in the tangent plane of x.
SpherePoint chart_point(const SpherePoint& x, const TangentFrame& frame, const Eigen::Vector2d& u) {
  return SpherePoint(x.vec() + u(0) * frame.e1 + u(1) * frame.e2);
}

Vector3d residual_of(const ScalarField& f, const TablePoints& pts) {
  double v[4];
  for (int i = 0; i < 4; ++i) v[i] = f(Vector3d(pts.col(i)));
  return {v[0] - v[1], v[1] - v[2], v[2] - v[3]};
}

struct DirectState {
  SpherePoint x;
  TangentFrame frame;
  double phi = 0;
};

Vector3d chart_residual(const ScalarField& f, const DirectState& s, double a, const Vector3d& d) {
  const SpherePoint y = chart_point(s.x, s.frame, d.head<2>());
  return residual_of(f, table_points(y, transport_frame(s.frame, y), a, s.phi + d(2)));
}

Eigen::Matrix3d chart_jacobian(const ScalarField& f, const DirectState& s, double a, double h) {
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    Vector3d d = Vector3d::Zero();
    d(k) = h;
    J.col(k) = (chart_residual(f, s, a, d) - chart_residual(f, s, a, -d)) / (2 * h);
  }
  return J;
}

struct DirectOutcome {
  TableSolution sol;
  double sigma_min = 0;
  bool converged = false;
};

DirectOutcome direct_newton(const ScalarField& f, const SpherePoint& x0, double phi0, double a,
                            const TableConfig& cfg) {
  DirectState s{x0, frame_at(x0), phi0};
  Vector3d r = chart_residual(f, s, a, Vector3d::Zero());
  double rn = r.norm();
  DirectOutcome out;
  for (int it = 0; it < cfg.newton_max_iter && rn >= cfg.newton_tol; ++it) {
    const Eigen::Matrix3d J = chart_jacobian(f, s, a, cfg.fd_step);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector3d step = svd.solve(-r);
    if (!step.allFinite()) break;
    if (step.norm() > 0.3) step *= 0.3 / step.norm();
    bool accepted = false;
    double lambda = 1;
    for (int k = 0; k < 25; ++k, lambda *= 0.5) {
      const Vector3d rt = chart_residual(f, s, a, lambda * step);
      if (rt.norm() < (1 - 1e-4 * lambda) * rn) {
        const SpherePoint y = chart_point(s.x, s.frame, lambda * step.head<2>());
        s = DirectState{y, transport_frame(s.frame, y), s.phi + lambda * step(2)};
        r = rt;
        rn = rt.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.converged = rn < cfg.newton_tol;
  if (!out.converged) return out;
  const Eigen::Matrix3d J = chart_jacobian(f, s, a, cfg.fd_step);
  out.sigma_min = Eigen::JacobiSVD<Eigen::Matrix3d>(J).singularValues()(2);
  const Vector3d dir = std::cos(s.phi) * s.frame.e1 + std::sin(s.phi) * s.frame.e2;
  out.sol.x = s.x;
  out.sol.a = a;
  out.sol.phi = frame_angle_mod_quarter(frame_at(s.x), dir);
  out.sol.points = table_points(s.x, a, out.sol.phi);
  out.sol.value_spread = value_spread(f, out.sol.points);
  return out;
}

bool contains(const std::vector<TableSolution>& tables, const TablePoints& pts, double tol) {
  return std::any_of(tables.begin(), tables.end(), [&](const TableSolution& t) {
    return point_set_distance(t.points, pts) < tol;
  });
}

void add_companions(const ScalarField& f, std::vector<TableSolution>& tables, double tol) {
  if (!f.even_only()) return;
  const std::size_t n = tables.size();
  for (std::size_t i = 0; i < n; ++i) {
    TableSolution c = antipodal_transport(f, tables[i]);
    if (!contains(tables, c.points, tol)) tables.push_back(std::move(c));
  }
}

void sort_tables(std::vector<TableSolution>& tables) {
  std::sort(tables.begin(), tables.end(), [](const TableSolution& a, const TableSolution& b) {
    for (int i = 0; i < 3; ++i) {
      if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    }
    return a.phi < b.phi;
  });
}

}  // namespace

void TableConfig::validate() const {
  if (base_seeds < 1 || phi_seeds < 1 || newton_max_iter < 1 || !(newton_tol > 0) ||
      !(dedupe_tol > 0) || !(genericity_floor > 0) || !(fd_step > 0) || sweep_rows < 2 ||
      !(center_tol > 0) || !(certificate_tol > 0) || !(square_tol > 0)) {
    throw InvalidInput("table configuration values must be positive (sweep_rows >= 2)");
  }
  peg.validate();
}

Vector3d table_residual(const ScalarField& f, const SpherePoint& x, double a, double phi) {
  return residual_of(f, table_points(x, a, phi));
}

TableSearchResult find_tables_direct(const ScalarField& f, double a, const TableConfig& cfg) {
  check_radius(a);
  cfg.validate();
  TableSearchResult result;
  std::vector<TableSolution> degenerate;
  for (const auto& x0 : fibonacci_sphere(cfg.base_seeds)) {
    for (int k = 0; k < cfg.phi_seeds; ++k) {
      const double phi0 = (kPi / 2) * (k + 0.5) / cfg.phi_seeds;
      DirectOutcome o = direct_newton(f, x0, phi0, a, cfg);
      if (!o.converged) continue;
      if (o.sigma_min < cfg.genericity_floor && !contains(degenerate, o.sol.points, 1e3 * cfg.dedupe_tol)) {
        degenerate.push_back(o.sol);
      }
      if (!contains(result.tables, o.sol.points, cfg.dedupe_tol)) {
        result.tables.push_back(std::move(o.sol));
      }
    }
  }
  if (result.tables.empty()) {
    throw SolverCoverageFailure("no table found at radius " + std::to_string(a) +
                                "; the base-point seed grid is too coarse");
  }
  if (degenerate.size() >= 8) {
    result.degenerate_family = true;
    result.tables = {degenerate.front()};
    return result;
  }
  add_companions(f, result.tables, cfg.dedupe_tol);
  sort_tables(result.tables);
  return result;
}

ScalarField positivity_shift(const ScalarField& f) {
  return f.shifted(1.0 + std::abs(f.sampled_min()));
}

FiberCurve fiber_curve_at(const ScalarField& f, const SpherePoint& x, double a) {
  return fiber_curve_at(f, x, frame_at(x), a);
}

FiberCurve fiber_curve_at(const ScalarField& f, const SpherePoint& x, const TangentFrame& frame,
                          double a) {
  check_radius(a);
  const double ca = std::cos(a), sa = std::sin(a);
  auto exact = [&](double theta) {
    const Vector3d p = ca * x.vec() + sa * (std::cos(theta) * frame.e1 + std::sin(theta) * frame.e2);
    return a * f(p.normalized());
  };
  FiberCurve fc{x, a, frame, RadialFunctiond{}, 0};
  // On a geodesic circle a degree-L harmonic restricts to a trigonometric
  // polynomial of degree L, so the fit is exact up to rounding.
  for (int degree = std::max(1, f.max_degree());; degree *= 2) {
    degree = std::min(degree, kFitDegreeCap);
    fc.radial = fit_radial<double>(exact, degree, 4 * degree + 8);
    fc.fit_residual = fit_error(fc.radial, exact, 1024);
    if (fc.fit_residual < kFitTarget) break;
    if (degree == kFitDegreeCap) {
      throw FitFailure("fiber fit residual " + std::to_string(fc.fit_residual) +
                       " above target at maximal degree");
    }
  }
  const auto cert = validate_positive(fc.radial, 0.0);
  if (!cert.positive) {
    throw InvalidInput("field is not positive on the geodesic circle; shift it first");
  }
  return fc;
}

FiberSquares fiber_graceful_squares(const ScalarField& f, const SpherePoint& x, double a,
                                    const SolveConfig& cfg) {
  FiberSquares out;
  out.fiber = fiber_curve_at(f, x, a);
  const PegResult peg = find_graceful_squares(out.fiber.radial, cfg);
  out.degenerate_family = peg.degenerate_family;
  for (const auto& s : peg.squares) {
    out.squares.push_back({s, s.vertices.rowwise().mean()});
  }
  return out;
}

int CenterRouteResult::certificate_failures() const {
  return static_cast<int>(std::count_if(events.begin(), events.end(), [](const RouteEvent& e) {
    return e.kind == "CertificateFailure";
  }));
}

std::vector<SpherePoint> sweep_grid(int rows) {
  std::vector<SpherePoint> pts;
  const int cols = 2 * rows;
  for (int i = 0; i < rows; ++i) {
    const double theta = kPi * (i + 0.5) / rows;
    for (int jj = 0; jj < cols; ++jj) {
      const int j = (i % 2 == 0) ? jj : cols - 1 - jj;
      const double lon = 2 * kPi * j / cols;
      pts.emplace_back(Vector3d(std::sin(theta) * std::cos(lon), std::sin(theta) * std::sin(lon),
                                std::cos(theta)));
    }
  }
  return pts;
}

namespace {

// Fiber radial in a given frame without the fit check; the restriction of a
// degree-L field to a geodesic circle is a trigonometric polynomial of degree L.
RadialFunctiond fiber_radial(const ScalarField& f, const SpherePoint& y, const TangentFrame& frame,
                             double a) {
  const double ca = std::cos(a), sa = std::sin(a);
  auto exact = [&](double theta) {
    return a * f(Vector3d(ca * y.vec() + sa * (std::cos(theta) * frame.e1 + std::sin(theta) * frame.e2)));
  };
  const int degree = std::max(1, f.max_degree());
  return fit_radial<double>(exact, degree, 4 * degree + 8);
}

// Unknowns: chart offset u of the base point and reduced square coordinates z.
// Equations: the square residual of the fiber curve and its center.
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct JointState {
  SpherePoint x;
  TangentFrame frame;
  QuadParamd param;
};

std::optional<Vector6d> joint_residual(const RadialFunctiond& h, const QuadParamd& p) {
  if (!p.is_valid()) return std::nullopt;
  Vector6d r;
  r.head<4>() = square_residual(h, p);
  r.tail<2>() = quad_vertices(h, p).rowwise().mean();
  return r;
}

std::optional<Vector6d> joint_residual_at(const ScalarField& f, double a, const JointState& s,
                                          const Eigen::Vector2d& u, const Vector4<double>& z) {
  const SpherePoint y = chart_point(s.x, s.frame, u);
  return joint_residual(fiber_radial(f, y, transport_frame(s.frame, y), a), QuadParamd::from_reduced(z));
}

double square_defect(const QuadParamd& p) {
  double d = 0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(kPi * p.t(i) - kPi / 2));
  return d;
}

struct CenterZero {
  JointState state;
  SquareSolution square;
  Eigen::Vector2d center;
};

// Damped Newton on the joint system from a fiber square at x0.
std::optional<CenterZero> center_newton(const ScalarField& fp, double a, const SpherePoint& x0,
                                        const FiberSquare& seed, const TableConfig& cfg) {
  constexpr double hu = 1e-6, hz = 1e-7;
  JointState s{x0, frame_at(x0), seed.square.param};
  RadialFunctiond h = fiber_radial(fp, s.x, s.frame, a);
  auto r0 = joint_residual(h, s.param);
  if (!r0) return std::nullopt;
  Vector6d r = *r0;
  const double tol = std::min(cfg.center_tol, cfg.peg.newton_tol);
  for (int it = 0; it < 2 * cfg.newton_max_iter && r.norm() >= tol; ++it) {
    Matrix6d J;
    const Vector4<double> z = s.param.reduced();
    for (int d = 0; d < 2; ++d) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(d) = hu;
      const auto plus = joint_residual_at(fp, a, s, e, z);
      const auto minus = joint_residual_at(fp, a, s, -e, z);
      if (!plus || !minus) return std::nullopt;
      J.col(d) = (*plus - *minus) / (2 * hu);
    }
    for (int d = 0; d < 4; ++d) {
      Vector4<double> e = Vector4<double>::Zero();
      e(d) = hz;
      const auto plus = joint_residual(h, QuadParamd::from_reduced(z + e));
      const auto minus = joint_residual(h, QuadParamd::from_reduced(z - e));
      if (!plus || !minus) return std::nullopt;
      J.col(2 + d) = (*plus - *minus) / (2 * hz);
    }
    // The square and center rows scale differently near a = π/2, so a step
    // may also be accepted when the simplified Newton correction shrinks.
    const Eigen::ColPivHouseholderQR<Matrix6d> qr(J);
    const Vector6d full = qr.solve(-r);
    if (!full.allFinite()) return std::nullopt;
    Vector6d step = full;
    if (step.norm() > 0.2) step *= 0.2 / step.norm();
    bool accepted = false;
    double lambda = 1;
    for (int b = 0; b < 20; ++b, lambda *= 0.5) {
      const Eigen::Vector2d u = lambda * step.head<2>();
      const SpherePoint y = chart_point(s.x, s.frame, u);
      const TangentFrame fr = transport_frame(s.frame, y);
      const RadialFunctiond hy = fiber_radial(fp, y, fr, a);
      const QuadParamd q = QuadParamd::from_reduced(z + lambda * step.tail<4>());
      const auto rt = joint_residual(hy, q);
      if (rt && (rt->norm() < (1 - 1e-4 * lambda) * r.norm() ||
                 qr.solve(-*rt).norm() < (1 - 0.5 * lambda) * full.norm())) {
        s = JointState{y, fr, q};
        h = hy;
        r = *rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  if (r.norm() >= tol) return std::nullopt;
  // Final square from the verified fiber fit.
  const FiberCurve fc = fiber_curve_at(fp, s.x, s.frame, a);
  const auto sq = refine_square(fc.radial, s.param, cfg.peg);
  if (!sq) return std::nullopt;
  return CenterZero{s, *sq, sq->vertices.rowwise().mean()};
}

// Table built from a zero of the center map: the first square vertex fixes φ.
TableSolution certified_table(const ScalarField& f, double a, const CenterZero& cz) {
  const Vector4<double> ang = cz.square.param.angles();
  const Vector3d dir = std::cos(ang(0)) * cz.state.frame.e1 + std::sin(ang(0)) * cz.state.frame.e2;
  TableSolution t;
  t.x = cz.state.x;
  t.a = a;
  t.phi = frame_angle_mod_quarter(frame_at(t.x), dir);
  t.points = table_points(t.x, a, t.phi);
  t.value_spread = value_spread(f, t.points);
  t.center_norm = cz.center.norm();
  return t;
}

}  // namespace

CenterRouteResult find_tables_via_center(const ScalarField& f, double a, const TableConfig& cfg) {
  check_radius(a);
  cfg.validate();
  const ScalarField fp = positivity_shift(f);
  CenterRouteResult result;

  // Sweep: all fiber squares per grid point.
  const int rows = cfg.sweep_rows, cols = 2 * rows;
  const auto grid = sweep_grid(rows);
  std::vector<std::vector<FiberSquare>> cells(grid.size());
  auto cell_index = [cols](int i, int j) {
    j = ((j % cols) + cols) % cols;
    return i * cols + ((i % 2 == 0) ? j : cols - 1 - j);
  };
  int degenerate_cells = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    try {
      FiberSquares fs = fiber_graceful_squares(fp, grid[k], a, cfg.peg);
      if (fs.degenerate_family) ++degenerate_cells;
      cells[k] = std::move(fs.squares);
    } catch (const std::exception& e) {
      result.events.push_back({"FiberFailure", e.what()});
    }
  }
  if (degenerate_cells == static_cast<int>(grid.size())) {
    // Every fiber is a circle: the center map vanishes identically.
    result.degenerate_family = true;
    const SpherePoint& x = grid.front();
    TableSolution t;
    t.x = x;
    t.a = a;
    t.phi = 0;
    t.points = table_points(x, a, 0);
    t.value_spread = value_spread(f, t.points);
    t.center_norm = cells.front().empty() ? 0.0 : cells.front().front().center.norm();
    result.tables.push_back(t);
    return result;
  }

  // Every fiber square of every cell seeds a Newton run, most promising
  // (smallest center) first.
  struct Seed {
    std::size_t cell;
    FiberSquare square;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const std::size_t k = cell_index(i, j);
      for (const auto& sq : cells[k]) seeds.push_back({k, sq});
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& l, const Seed& r) {
    return l.square.center.norm() < r.square.center.norm();
  });
  auto try_seed = [&](const SpherePoint& x, const FiberSquare& square) {
    const auto cz = center_newton(fp, a, x, square, cfg);
    if (!cz) return false;
    TableSolution t = certified_table(f, a, *cz);
    if (*t.center_norm <= 1e-8 && (t.value_spread > cfg.certificate_tol ||
                                   square_defect(cz->square.param) > cfg.square_tol)) {
      result.events.push_back({"CertificateFailure",
                               "center " + std::to_string(*t.center_norm) + " spread " +
                                   std::to_string(t.value_spread) + " square defect " +
                                   std::to_string(square_defect(cz->square.param))});
      return false;
    }
    if (contains(result.tables, t.points, cfg.dedupe_tol)) return false;
    result.tables.push_back(std::move(t));
    return true;
  };
  for (const Seed& seed : seeds) try_seed(grid[seed.cell], seed.square);

  // Zeros closer than the grid spacing can hide further zeros between them
  // whose basins no grid seed reaches; rings of seeds around each clustered
  // zero resolve them.
  const double spacing = kPi / rows;
  std::vector<bool> ringed;
  for (bool grew = true; grew;) {
    grew = false;
    ringed.resize(result.tables.size(), false);
    const std::size_t n = result.tables.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (ringed[i]) continue;
      const SpherePoint z = result.tables[i].x;
      const bool clustered = std::any_of(result.tables.begin(), result.tables.begin() + n,
                                         [&](const TableSolution& o) {
                                           const double d = geodesic_distance(o.x, z);
                                           return d > 0 && d < spacing;
                                         });
      if (!clustered) continue;
      ringed[i] = true;
      const TangentFrame fr = frame_at(z);
      for (double radius : {0.25 * spacing, 0.5 * spacing}) {
        for (int k = 0; k < kRingSeeds; ++k) {
          const double ang = 2 * kPi * k / kRingSeeds;
          const SpherePoint y =
              exp_map(z, radius * (std::cos(ang) * fr.e1 + std::sin(ang) * fr.e2));
          try {
            for (const auto& sq : fiber_graceful_squares(fp, y, a, cfg.peg).squares) {
              grew = try_seed(y, sq) || grew;
            }
          } catch (const std::exception& e) {
            result.events.push_back({"FiberFailure", e.what()});
          }
        }
      }
    }
  }
  add_companions(f, result.tables, cfg.dedupe_tol);
  sort_tables(result.tables);
  if (result.tables.empty()) {
    throw SolverCoverageFailure("center route found no zero of the center map at radius " +
                                std::to_string(a));
  }
  return result;
}

ParitySweepReport fiber_parity_sweep(const ScalarField& f, double a, int rows,
                                     const SolveConfig& cfg) {
  check_radius(a);
  if (rows < 2) throw InvalidInput("sweep needs at least two rows");
  const ScalarField fp = positivity_shift(f);
  ParitySweepReport report;
  for (const auto& x : sweep_grid(rows)) {
    SweepPoint pt;
    pt.x = x;
    try {
      const FiberCurve fc = fiber_curve_at(fp, x, a);
      const ParityResult pr = parity(fc.radial, cfg);
      pt.count = pr.count;
      pt.parity = pr.parity;
      pt.generic = true;
      pt.status = "ok";
    } catch (const GenericityFailure& e) {
      pt.count = e.count();
      pt.status = e.degenerate_family() ? "DegenerateFamily" : "GenericityFailure";
    } catch (const SolverCoverageFailure&) {
      pt.status = "SolverCoverageFailure";
    } catch (const FitFailure&) {
      pt.status = "FitFailure";
    }
    if (pt.generic) {
      ++report.generic_points;
      if (pt.parity != 1) report.all_generic_odd = false;
    } else {
      ++report.flagged_points;
    }
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace starpeg
