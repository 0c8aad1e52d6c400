#ifndef STARPEG_SPHERE_GEOMETRY_HPP
#define STARPEG_SPHERE_GEOMETRY_HPP

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace starpeg {

using Eigen::Vector3d;
using TablePoints = Eigen::Matrix<double, 3, 4>;

inline constexpr int kDefaultHarmonicCap = 8;

/// Point of the unit sphere; the constructor renormalizes.
class SpherePoint {
 public:
  SpherePoint() : p_(0, 0, 1) {}
  explicit SpherePoint(const Vector3d& v);

  const Vector3d& vec() const { return p_; }
  double operator[](int i) const { return p_(i); }
  SpherePoint antipode() const;

 private:
  Vector3d p_;
};

/// Tangent vector at a base point. Any normal component of the input is
/// projected out, so vec·base = 0 holds up to rounding.
class TangentVector {
 public:
  TangentVector(const SpherePoint& base, const Vector3d& v);

  const SpherePoint& base() const { return base_; }
  const Vector3d& vec() const { return v_; }
  double norm() const { return v_.norm(); }

 private:
  SpherePoint base_;
  Vector3d v_;
};

struct TangentFrame {
  Vector3d e1;
  Vector3d e2;
};

// cos|v|·x + sin|v|·v/|v|. Throws InjectivityRadiusExceeded for |v| ≥ π.
SpherePoint exp_map(const TangentVector& v);
SpherePoint exp_map(const SpherePoint& x, const Vector3d& v);

double geodesic_distance(const SpherePoint& a, const SpherePoint& b);

/// Deterministic orthonormal tangent frame: a is the coordinate axis least
/// aligned with x (first such axis on ties), e2 = x × a / |x × a|, e1 = e2 × x.
/// The frame is right-handed (e1 × e2 = x) but not continuous in x.
TangentFrame frame_at(const SpherePoint& x);

// Frame at y obtained by projecting `frame` (a frame at a nearby point) onto
// T_y and re-orthonormalizing; continuous in y.
TangentFrame transport_frame(const TangentFrame& frame, const SpherePoint& y);

struct HarmonicTerm {
  int degree = 0;  // ℓ
  int order = 0;   // m, |m| ≤ ℓ
  double coeff = 0;
};

/// Real orthonormal spherical harmonics without the Condon–Shortley phase:
///   Y_ℓ0 = K_ℓ0 P_ℓ(z),
///   Y_ℓm = √2 K_ℓm Q_ℓm(z) Re((x+iy)^m),   m > 0,
///   Y_ℓm = √2 K_ℓ|m| Q_ℓ|m|(z) Im((x+iy)^|m|), m < 0,
/// with K_ℓm = sqrt((2ℓ+1)/(4π) · (ℓ−m)!/(ℓ+m)!) and Q_ℓm = P_ℓ^m / sin^m θ.
/// Every term is a polynomial in (x, y, z) of parity (−1)^ℓ.
double real_harmonic(int degree, int order, const Vector3d& p);

// All Y_ℓm with ℓ ≤ max_degree at p, index ℓ² + ℓ + m.
Eigen::VectorXd real_harmonics_upto(int max_degree, const Vector3d& p);

class ScalarField {
 public:
  ScalarField() = default;
  // Throws InvalidInput for |m| > ℓ, ℓ above the cap, non-finite
  // coefficients, or odd ℓ when even_only is set.
  ScalarField(std::vector<HarmonicTerm> terms, bool even_only, int degree_cap = kDefaultHarmonicCap);

  static ScalarField constant(double value);

  double operator()(const SpherePoint& p) const;
  double operator()(const Vector3d& unit) const;

  const std::vector<HarmonicTerm>& terms() const { return terms_; }
  bool even_only() const { return even_only_; }
  int max_degree() const { return max_degree_; }

  // f + c, realised through the Y₀₀ coefficient.
  ScalarField shifted(double c) const;

  // Minimum over a deterministic Fibonacci sample of the sphere.
  double sampled_min(int samples = 4096) const;

 private:
  std::vector<HarmonicTerm> terms_;
  bool even_only_ = false;
  int max_degree_ = 0;
  Eigen::VectorXd dense_;  // coefficient per ℓ² + ℓ + m
};

double field_eval(const ScalarField& f, const SpherePoint& p);

// n nearly uniform points (Fibonacci lattice), deterministic.
std::vector<SpherePoint> fibonacci_sphere(int n);

/// The square exp(x, ±v), exp(x, ±w) with v = a(cos φ e1 + sin φ e2) and
/// w = a(−sin φ e1 + cos φ e2) in frame_at(x); columns are p1..p4 in the
/// order +v, +w, −v, −w. Requires 0 < a ≤ π/2.
TablePoints table_points(const SpherePoint& x, double a, double phi);
TablePoints table_points(const SpherePoint& x, const TangentFrame& frame, double a, double phi);

// Hausdorff distance between two 4-point sets.
double point_set_distance(const TablePoints& a, const TablePoints& b);

struct TableSolution {
  SpherePoint x;
  double a = 0;
  double phi = 0;  // in [0, π/2), relative to frame_at(x)
  TablePoints points = TablePoints::Zero();
  double value_spread = 0;
  std::optional<double> center_norm;  // set by the fiber route
};

// max_{i,j} |f(p_i) − f(p_j)|
double value_spread(const ScalarField& f, const TablePoints& points);

/// Companion table at −x for an even field: points −p_i and the frame angle of
/// −v in frame_at(−x). Throws EvennessRequired for fields that are not even_only.
TableSolution antipodal_transport(const ScalarField& f, const TableSolution& sol);

// Angle of tangent direction d in the given frame, reduced to [0, π/2).
double frame_angle_mod_quarter(const TangentFrame& frame, const Vector3d& d);

}  // namespace starpeg

#endif  // STARPEG_SPHERE_GEOMETRY_HPP
