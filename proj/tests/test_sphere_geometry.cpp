#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "starpeg/errors.hpp"
#include "starpeg/sphere_geometry.hpp"

using namespace starpeg;
using fixtures::kPi;

namespace {

Vector3d random_unit(std::mt19937_64& rng) {
  // Marsaglia: uniform on the sphere from two uniforms.
  while (true) {
    const double u = 2 * unit_uniform(rng) - 1, v = 2 * unit_uniform(rng) - 1;
    const double s = u * u + v * v;
    if (s >= 1) continue;
    const double r = 2 * std::sqrt(1 - s);
    return {u * r, v * r, 1 - 2 * s};
  }
}

Vector3d random_tangent(std::mt19937_64& rng, const Vector3d& x, double len) {
  Vector3d v = random_unit(rng);
  v -= v.dot(x) * x;
  return len * v.normalized();
}

}  // namespace

TEST_CASE("exponential map examples") {
  const SpherePoint n(Vector3d(0, 0, 1));
  CHECK((exp_map(n, Vector3d::Zero()).vec() - n.vec()).norm() == 0);
  CHECK((exp_map(n, Vector3d(kPi / 2, 0, 0)).vec() - Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(exp_map(n, Vector3d(kPi, 0, 0)), InjectivityRadiusExceeded);
  CHECK_THROWS_AS(exp_map(n, Vector3d(4, 0, 0)), InjectivityRadiusExceeded);
}

TEST_CASE("geodesic distance equals tangent length") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint x(random_unit(rng));
    const double len = kPi * (0.001 + 0.998 * unit_uniform(rng));
    const SpherePoint y = exp_map(x, random_tangent(rng, x.vec(), len));
    CHECK(std::abs(y.vec().norm() - 1) < 1e-15);
    CHECK(std::abs(std::acos(std::clamp(x.vec().dot(y.vec()), -1.0, 1.0)) - len) < 1e-7);
    CHECK(std::abs(geodesic_distance(x, y) - len) < 1e-10);
  }
}

TEST_CASE("tangent frames") {
  const TangentFrame f = frame_at(SpherePoint(Vector3d(0, 0, 1)));
  CHECK((f.e1 - Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK((f.e2 - Vector3d(0, 1, 0)).norm() < 1e-15);
  std::mt19937_64 rng(43);
  for (int i = 0; i < 200; ++i) {
    const SpherePoint x(random_unit(rng));
    const TangentFrame g = frame_at(x);
    Eigen::Matrix3d B;
    B << x.vec(), g.e1, g.e2;
    CHECK((B.transpose() * B - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(B.determinant() > 0);
    const TangentFrame again = frame_at(x);
    CHECK(again.e1 == g.e1);
    const SpherePoint y = exp_map(x, random_tangent(rng, x.vec(), 0.01));
    const TangentFrame t = transport_frame(g, y);
    Eigen::Matrix3d C;
    C << y.vec(), t.e1, t.e2;
    CHECK((C.transpose() * C - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((t.e1 - g.e1).norm() < 0.02);
  }
}

TEST_CASE("harmonics match closed forms") {
  std::mt19937_64 rng(47);
  const double c1 = std::sqrt(3 / (4 * kPi));
  const double c2 = 0.5 * std::sqrt(15 / kPi);
  for (int i = 0; i < 50; ++i) {
    const Vector3d p = random_unit(rng);
    const double x = p.x(), y = p.y(), z = p.z();
    CHECK(real_harmonic(0, 0, p) == doctest::Approx(1 / (2 * std::sqrt(kPi))));
    CHECK(real_harmonic(1, 0, p) == doctest::Approx(c1 * z));
    CHECK(real_harmonic(1, 1, p) == doctest::Approx(c1 * x));
    CHECK(real_harmonic(1, -1, p) == doctest::Approx(c1 * y));
    CHECK(real_harmonic(2, 0, p) == doctest::Approx(0.25 * std::sqrt(5 / kPi) * (3 * z * z - 1)));
    CHECK(real_harmonic(2, 1, p) == doctest::Approx(c2 * x * z));
    CHECK(real_harmonic(2, -1, p) == doctest::Approx(c2 * y * z));
    CHECK(real_harmonic(2, 2, p) == doctest::Approx(0.5 * c2 * (x * x - y * y)));
    CHECK(real_harmonic(2, -2, p) == doctest::Approx(c2 * x * y));
  }
}

TEST_CASE("harmonics agree with the associated-Legendre oracle") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 20; ++i) {
    const Vector3d p = random_unit(rng);
    const Eigen::VectorXd all = real_harmonics_upto(8, p);
    for (int l = 0; l <= 8; ++l) {
      for (int m = -l; m <= l; ++m) {
        CHECK(all(l * l + l + m) == doctest::Approx(oracle::harmonic(l, m, p)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("harmonics are orthonormal under Gauss-Legendre quadrature") {
  const int L = 6;
  const int n = (L + 1) * (L + 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> z, w;
  oracle::gauss_legendre(2 * L + 2, z, w);
  const int lon = 4 * L + 4;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = std::sqrt(1 - z[i] * z[i]);
    for (int j = 0; j < lon; ++j) {
      const double phi = 2 * kPi * j / lon;
      const Eigen::VectorXd Y = real_harmonics_upto(L, Vector3d(r * std::cos(phi), r * std::sin(phi), z[i]));
      gram += w[i] * (2 * kPi / lon) * Y * Y.transpose();
    }
  }
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("field fixtures") {
  const ScalarField y00({{0, 0, 1.0}}, true);
  std::mt19937_64 rng(59);
  for (int i = 0; i < 10; ++i) CHECK(y00(random_unit(rng)) == doctest::Approx(1 / (2 * std::sqrt(kPi))));
  const ScalarField z2 = fixtures::z_squared();
  CHECK(z2(Vector3d(0, 0, 1)) == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 50; ++i) {
    const Vector3d p = random_unit(rng);
    CHECK(z2(p) == doctest::Approx(p.z() * p.z()).epsilon(1e-13));
  }
  CHECK(ScalarField::constant(2.5)(Vector3d(0.6, 0, 0.8)) == doctest::Approx(2.5));
}

TEST_CASE("even fields are even") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 3; ++k) {
    const ScalarField f = fixtures::even_field(k);
    for (int i = 0; i < 1000; ++i) {
      const Vector3d p = random_unit(rng);
      REQUIRE(std::abs(f(p) - f(Vector3d(-p))) < 1e-13);
    }
  }
}

TEST_CASE("field validation") {
  CHECK_THROWS_AS(ScalarField({{2, 3, 1.0}}, false), InvalidInput);
  CHECK_THROWS_AS(ScalarField({{9, 0, 1.0}}, false), InvalidInput);
  CHECK_THROWS_AS(ScalarField({{3, 1, 1.0}}, true), InvalidInput);
  CHECK_THROWS_AS(ScalarField({{1, 0, std::nan("")}}, false), InvalidInput);
  CHECK_THROWS_AS(SpherePoint(Vector3d::Zero()), InvalidInput);
}

TEST_CASE("table points") {
  const SpherePoint n(Vector3d(0, 0, 1));
  const TablePoints p = table_points(n, kPi / 2, 0);
  const Vector3d expect[4] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  for (int i = 0; i < 4; ++i) CHECK((p.col(i) - expect[i]).norm() < 1e-15);
  CHECK_THROWS_AS(table_points(n, 2.0, 0), InvalidInput);
  CHECK_THROWS_AS(table_points(n, 0.0, 0), InvalidInput);

  std::mt19937_64 rng(67);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint x(random_unit(rng));
    const double a = 0.05 + 1.5 * unit_uniform(rng), phi = 2 * kPi * unit_uniform(rng);
    const TablePoints q = table_points(x, a, phi);
    double side[4];
    for (int k = 0; k < 4; ++k) {
      side[k] = (q.col((k + 1) % 4) - q.col(k)).norm();
      CHECK(geodesic_distance(x, SpherePoint(q.col(k))) == doctest::Approx(a).epsilon(1e-12));
    }
    for (int k = 1; k < 4; ++k) CHECK(side[k] == doctest::Approx(side[0]).epsilon(1e-12));
    CHECK((q.col(0) - q.col(2)).norm() == doctest::Approx((q.col(1) - q.col(3)).norm()).epsilon(1e-12));
    CHECK(point_set_distance(q, table_points(x, a, phi + kPi / 2)) < 1e-12);
  }
}

TEST_CASE("antipodal transport") {
  const ScalarField f = fixtures::even_field(0);
  TableSolution s;
  s.x = SpherePoint(Vector3d(0, 0, 1));
  s.a = 0.4;
  s.phi = 0.3;
  s.points = table_points(s.x, s.a, s.phi);
  s.value_spread = value_spread(f, s.points);
  const TableSolution c = antipodal_transport(f, s);
  CHECK((c.x.vec() - Vector3d(0, 0, -1)).norm() < 1e-15);
  CHECK(point_set_distance(c.points, table_points(c.x, c.a, c.phi)) < 1e-12);
  CHECK(c.value_spread == doctest::Approx(s.value_spread).epsilon(1e-12));
  const TableSolution back = antipodal_transport(f, c);
  CHECK(point_set_distance(back.points, s.points) < 1e-12);
  CHECK_THROWS_AS(antipodal_transport(ScalarField({{1, 0, 1.0}}, false), s), EvennessRequired);
}

TEST_CASE("fibonacci points") {
  const auto pts = fibonacci_sphere(500);
  CHECK(pts.size() == 500);
  Vector3d mean = Vector3d::Zero();
  for (const auto& p : pts) mean += p.vec();
  CHECK(mean.norm() / 500 < 1e-3);
}
