#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "starpeg/errors.hpp"
#include "starpeg/table_solver.hpp"

using namespace starpeg;
using fixtures::kPi;

namespace {

const double kSqrtPi = std::sqrt(kPi);

// 1 + εz in the orthonormal basis.
ScalarField one_plus_z(double eps) { return ScalarField({{0, 0, 2 * kSqrtPi}, {1, 0, eps * std::sqrt(4 * kPi / 3)}}, false); }

// 1 + c(x² − y²).
ScalarField saddle(double c) {
  const double y22 = 0.25 * std::sqrt(15 / kPi);
  return ScalarField({{0, 0, 2 * kSqrtPi}, {2, 2, c / y22}}, true);
}

double nearest(const TablePoints& p, const std::vector<TableSolution>& set) {
  double best = 1e300;
  for (const auto& s : set) best = std::min(best, point_set_distance(p, s.points));
  return best;
}

}  // namespace

TEST_CASE("table residual examples") {
  const SpherePoint n(Vector3d(0, 0, 1));
  CHECK(table_residual(ScalarField::constant(3.0), n, 0.7, 0.2).norm() < 1e-14);
  const ScalarField z({{1, 0, std::sqrt(4 * kPi / 3)}}, false);
  CHECK(table_residual(z, n, kPi / 2, 0.4).norm() < 1e-15);

  // Two of the points sit at height ±sin(π/4), the other two on the equator.
  const Vector3d r = table_residual(fixtures::z_squared(), SpherePoint(Vector3d(1, 0, 0)), kPi / 4, 0);
  CHECK(std::abs(r(0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r(1) == doctest::Approx(-r(0)).epsilon(1e-12));
  CHECK(r(2) == doctest::Approx(r(0)).epsilon(1e-12));
}

TEST_CASE("direct route agrees with the grid-scan oracle") {
  for (int w : {0, 1}) {
    for (double a : {kPi / 6, kPi / 3}) {
      CAPTURE(w);
      CAPTURE(a);
      const ScalarField f = fixtures::even_field(w);
      const TableSearchResult r = find_tables_direct(f, a);
      const auto scanned = oracle::scan_tables(fixtures::to_oracle(f), a);
      CHECK(scanned.size() == r.tables.size());
      for (const auto& t : scanned) {
        double best = 1e300;
        for (const auto& s : r.tables) best = std::min(best, oracle::table_distance(t, fixtures::to_oracle(s.points)));
        CHECK(best < 1e-6);
      }
      for (const auto& s : r.tables) {
        CHECK(s.value_spread < 1e-8);
        CHECK(std::abs(oracle::field(fixtures::to_oracle(f), s.points.col(0)) -
                       oracle::field(fixtures::to_oracle(f), s.points.col(2))) < 1e-8);
      }
    }
  }
}

TEST_CASE("even fields pair tables with their antipodes") {
  const ScalarField f = fixtures::even_field(1);
  const TableSearchResult r = find_tables_direct(f, kPi / 4);
  REQUIRE_FALSE(r.tables.empty());
  CHECK(r.tables.size() % 2 == 0);
  for (const auto& s : r.tables) CHECK(nearest(antipodal_transport(f, s).points, r.tables) < 1e-8);
}

TEST_CASE("constant field is a degenerate family") {
  const TableSearchResult r = find_tables_direct(ScalarField::constant(1.0), kPi / 5);
  CHECK(r.degenerate_family);
  CHECK(r.tables.size() == 1);
}

TEST_CASE("input validation") {
  const ScalarField f = fixtures::even_field(0);
  CHECK_THROWS_AS(find_tables_direct(f, 2.0), InvalidInput);
  CHECK_THROWS_AS(find_tables_direct(f, -0.1), InvalidInput);
  TableConfig bad;
  bad.base_seeds = 0;
  CHECK_THROWS_AS(find_tables_direct(f, 0.5, bad), InvalidInput);
}

TEST_CASE("fiber curves") {
  const SpherePoint n(Vector3d(0, 0, 1));
  const double a = 0.6;
  const ScalarField f = fixtures::even_field(0).shifted(3.0);
  const FiberCurve c = fiber_curve_at(f, n, a);
  CHECK(c.fit_residual < 1e-9);
  const Vector3d p0 = exp_map(n, a * c.frame.e1).vec();
  CHECK(c.radial(0.0) == doctest::Approx(a * f(p0)).epsilon(1e-9));
  const Vector3d p1 = exp_map(n, a * (std::cos(1.1) * c.frame.e1 + std::sin(1.1) * c.frame.e2)).vec();
  CHECK(c.radial(1.1) == doctest::Approx(a * f(p1)).epsilon(1e-9));

  // A zonal field seen from the pole gives a round fiber.
  const FiberCurve round = fiber_curve_at(one_plus_z(0.3), n, a);
  const double expect = a * (1 + 0.3 * std::cos(a));
  for (double theta : {0.0, 1.0, 2.5, 4.0}) CHECK(round.radial(theta) == doctest::Approx(expect).epsilon(1e-10));

  CHECK_THROWS_AS(fiber_curve_at(ScalarField({{1, 0, -1.0}}, false), n, a), InvalidInput);
}

TEST_CASE("ellipse-like fiber has one centered square") {
  const FiberSquares fs = fiber_graceful_squares(saddle(0.3), SpherePoint(Vector3d(0, 0, 1)), 0.5);
  REQUIRE(fs.squares.size() == 1);
  CHECK(fs.squares.front().center.norm() < 1e-9);
  CHECK_FALSE(fs.degenerate_family);
}

TEST_CASE("center route agrees with the direct route") {
  const ScalarField f = fixtures::even_field(0);
  const double a = kPi / 6;
  const TableSearchResult d = find_tables_direct(f, a);
  const CenterRouteResult c = find_tables_via_center(f, a);
  CHECK(c.certificate_failures() == 0);
  CHECK(c.tables.size() == d.tables.size());
  for (const auto& t : d.tables) CHECK(nearest(t.points, c.tables) < 1e-5);
  for (const auto& t : c.tables) {
    CHECK(nearest(t.points, d.tables) < 1e-5);
    REQUIRE(t.center_norm.has_value());
    CHECK(*t.center_norm <= 1e-8);
    CHECK(t.value_spread <= 1e-6);
  }
}

TEST_CASE("sweep grid") {
  const auto g = sweep_grid(4);
  REQUIRE(g.size() == 32);
  for (const auto& p : g) CHECK(std::abs(p.vec().norm() - 1) < 1e-15);
  CHECK(std::acos(g.front()[2]) == doctest::Approx(kPi / 8));
  // Serpentine: the first point of row 2 neighbors the last point of row 1.
  CHECK(geodesic_distance(g[7], g[8]) < geodesic_distance(g[0], g[8]));
}

TEST_CASE("fiber parity sweep is consistent with single fibers") {
  const ScalarField f = fixtures::even_field(0);
  const ParitySweepReport rep = fiber_parity_sweep(f, kPi / 6, 3);
  REQUIRE(rep.points.size() == 18);
  CHECK(rep.generic_points + rep.flagged_points == 18);
  const ScalarField shifted = positivity_shift(f);
  for (std::size_t i = 0; i < rep.points.size(); i += 5) {
    const auto& p = rep.points[i];
    if (!p.generic) continue;
    CHECK(p.parity == 1);
    const FiberSquares fs = fiber_graceful_squares(shifted, p.x, kPi / 6);
    CHECK(int(fs.squares.size()) == p.count);
  }
}

TEST_CASE("positivity shift") {
  const ScalarField f = fixtures::even_field(2);
  const ScalarField g = positivity_shift(f);
  CHECK(g.sampled_min() >= 1.0 - 1e-12);
  const Vector3d p(0.36, 0.48, 0.8);
  CHECK(g(p) - f(p) == doctest::Approx(g(Vector3d(0, 0, 1)) - f(Vector3d(0, 0, 1))));
}
