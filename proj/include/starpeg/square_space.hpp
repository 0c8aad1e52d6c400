#ifndef STARPEG_SQUARE_SPACE_HPP
#define STARPEG_SQUARE_SPACE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "starpeg/errors.hpp"
#include "starpeg/radial_curve.hpp"

namespace starpeg {

template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

// Four planar points stored column-wise.
template <typename Scalar>
using QuadVertices = Eigen::Matrix<Scalar, 2, 4>;

/// A point of S¹ × (open simplex): base angle x and angular increments t with
/// t_i > 0 and Σ t_i = 2. Vertex i sits at angle x + π·(t_0 + ... + t_{i-1}),
/// so the four increments close the circle.
template <typename Scalar>
struct QuadParam {
  Scalar x = 0;
  Vector4<Scalar> t = Vector4<Scalar>::Constant(Scalar(0.5));

  // Solver coordinates (x, t0, t1, t2); t3 is eliminated.
  Vector4<Scalar> reduced() const { return {x, t(0), t(1), t(2)}; }

  static QuadParam from_reduced(const Vector4<Scalar>& z) {
    QuadParam p;
    p.x = z(0);
    p.t << z(1), z(2), z(3), Scalar(2) - z(1) - z(2) - z(3);
    return p;
  }

  bool is_valid(Scalar floor = Scalar(0)) const {
    return std::isfinite(x) && t.allFinite() && (t.array() > floor).all() &&
           std::abs(t.sum() - Scalar(2)) < Scalar(1e-9);
  }

  Vector4<Scalar> angles() const {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    Vector4<Scalar> a;
    a(0) = x;
    a(1) = x + pi * t(0);
    a(2) = x + pi * (t(0) + t(1));
    a(3) = x + pi * (t(0) + t(1) + t(2));
    return a;
  }
};

using QuadParamd = QuadParam<double>;

template <typename Scalar>
QuadVertices<Scalar> quad_vertices(const RadialFunction<Scalar>& h, const QuadParam<Scalar>& p) {
  const Vector4<Scalar> ang = p.angles();
  QuadVertices<Scalar> v;
  for (int i = 0; i < 4; ++i) v.col(i) = curve_point(h, ang(i));
  return v;
}

/// (s₀−s₁, s₁−s₂, s₂−s₃, d₀−d₁) from squared consecutive sides s_i = |v_{i+1}−v_i|²
/// and squared diagonals d₀ = |v₀−v₂|², d₁ = |v₁−v₃|². Zero exactly on squares.
template <typename Scalar>
Vector4<Scalar> square_residual_of(const QuadVertices<Scalar>& v) {
  Vector4<Scalar> s;
  for (int i = 0; i < 4; ++i) s(i) = (v.col((i + 1) % 4) - v.col(i)).squaredNorm();
  const Scalar d0 = (v.col(0) - v.col(2)).squaredNorm();
  const Scalar d1 = (v.col(1) - v.col(3)).squaredNorm();
  return {s(0) - s(1), s(1) - s(2), s(2) - s(3), d0 - d1};
}

template <typename Scalar>
Vector4<Scalar> square_residual(const RadialFunction<Scalar>& h, const QuadParam<Scalar>& p) {
  return square_residual_of(quad_vertices(h, p));
}

/// Gradient of the residual with respect to the eight vertex coordinates
/// (column 2i+j is ∂/∂v_i[j]).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 8> residual_vertex_gradient(const QuadVertices<Scalar>& v) {
  Eigen::Matrix<Scalar, 8, 4> ds = Eigen::Matrix<Scalar, 8, 4>::Zero();  // rows: coords, cols: s_i
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    const Vector2<Scalar> e = v.col(j) - v.col(i);
    ds.template block<2, 1>(2 * j, i) += 2 * e;
    ds.template block<2, 1>(2 * i, i) -= 2 * e;
  }
  Eigen::Matrix<Scalar, 8, 1> dd0 = Eigen::Matrix<Scalar, 8, 1>::Zero();
  Eigen::Matrix<Scalar, 8, 1> dd1 = Eigen::Matrix<Scalar, 8, 1>::Zero();
  const Vector2<Scalar> e02 = v.col(0) - v.col(2);
  const Vector2<Scalar> e13 = v.col(1) - v.col(3);
  dd0.template segment<2>(0) = 2 * e02;
  dd0.template segment<2>(4) = -2 * e02;
  dd1.template segment<2>(2) = 2 * e13;
  dd1.template segment<2>(6) = -2 * e13;
  Eigen::Matrix<Scalar, 4, 8> g;
  g.row(0) = (ds.col(0) - ds.col(1)).transpose();
  g.row(1) = (ds.col(1) - ds.col(2)).transpose();
  g.row(2) = (ds.col(2) - ds.col(3)).transpose();
  g.row(3) = (dd0 - dd1).transpose();
  return g;
}

/// Analytic Jacobian of square_residual with respect to (x, t0, t1, t2) with
/// t3 = 2 − t0 − t1 − t2. Each vertex moves along
/// dγ/dα = h'(α)·u(α) + h(α)·u⊥(α), and ∂α_i/∂t_k = π for k < i.
template <typename Scalar>
Matrix4<Scalar> residual_jacobian(const RadialFunction<Scalar>& h, const QuadParam<Scalar>& p) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Vector4<Scalar> ang = p.angles();
  QuadVertices<Scalar> v;
  QuadVertices<Scalar> tangent;
  for (int i = 0; i < 4; ++i) {
    const Scalar r = reduce_angle(ang(i));
    const auto jet = h.jet(r);
    const Vector2<Scalar> u(std::cos(r), std::sin(r));
    const Vector2<Scalar> u_perp(-u(1), u(0));
    v.col(i) = jet.value * u;
    tangent.col(i) = jet.first * u + jet.value * u_perp;
  }
  Eigen::Matrix<Scalar, 8, 4> dv = Eigen::Matrix<Scalar, 8, 4>::Zero();
  for (int i = 0; i < 4; ++i) {
    dv.template block<2, 1>(2 * i, 0) = tangent.col(i);
    for (int k = 0; k < i; ++k) dv.template block<2, 1>(2 * i, k + 1) = pi * tangent.col(i);
  }
  return residual_vertex_gradient(v) * dv;
}

// Derivative of the residual when the radial function moves by `velocity`
// at fixed parameters: each vertex moves radially by velocity(α_i).
template <typename Scalar>
Vector4<Scalar> residual_radial_derivative(const RadialFunction<Scalar>& h,
                                           const RadialFunction<Scalar>& velocity,
                                           const QuadParam<Scalar>& p) {
  const Vector4<Scalar> ang = p.angles();
  Eigen::Matrix<Scalar, 8, 1> dv;
  for (int i = 0; i < 4; ++i) {
    const Scalar r = reduce_angle(ang(i));
    dv.template segment<2>(2 * i) = velocity(r) * Vector2<Scalar>(std::cos(r), std::sin(r));
  }
  return residual_vertex_gradient(quad_vertices(h, p)) * dv;
}

/// Generator ε of the free Z₄ action: [x, (t0,t1,t2,t3)] ↦ [x + π·t0, (t1,t2,t3,t0)].
/// It relabels the same quadrilateral starting from its second vertex.
template <typename Scalar>
QuadParam<Scalar> z4_generator(const QuadParam<Scalar>& p) {
  QuadParam<Scalar> q;
  q.x = reduce_angle(p.x + std::numbers::pi_v<Scalar> * p.t(0));
  q.t << p.t(1), p.t(2), p.t(3), p.t(0);
  return q;
}

template <typename Scalar>
std::array<QuadParam<Scalar>, 4> z4_orbit(const QuadParam<Scalar>& p) {
  std::array<QuadParam<Scalar>, 4> orbit;
  orbit[0] = p;
  orbit[0].x = reduce_angle(p.x);
  for (int k = 1; k < 4; ++k) orbit[k] = z4_generator(orbit[k - 1]);
  return orbit;
}

/// Orbit representative with the lexicographically smallest t; exact ties
/// (symmetric tuples) fall back to the smallest reduced base angle.
template <typename Scalar>
QuadParam<Scalar> z4_canonical(const QuadParam<Scalar>& p) {
  const auto orbit = z4_orbit(p);
  auto less = [](const QuadParam<Scalar>& a, const QuadParam<Scalar>& b) {
    for (int i = 0; i < 4; ++i) {
      if (a.t(i) != b.t(i)) return a.t(i) < b.t(i);
    }
    return a.x < b.x;
  };
  return *std::min_element(orbit.begin(), orbit.end(), less);
}

// Euclidean distance in (x, t) coordinates with x measured on the circle.
template <typename Scalar>
Scalar param_distance(const QuadParam<Scalar>& a, const QuadParam<Scalar>& b) {
  const Scalar dx = angle_difference(a.x, b.x);
  return std::sqrt(dx * dx + (a.t - b.t).squaredNorm());
}

// Distance between Z₄ orbits: the minimum over relabelings of b.
template <typename Scalar>
Scalar orbit_distance(const QuadParam<Scalar>& a, const QuadParam<Scalar>& b) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto& q : z4_orbit(b)) best = std::min(best, param_distance(a, q));
  return best;
}

/// True iff the four points have the same cyclic order about the origin as
/// around their circumscribed circle. For four points a cyclic order up to
/// orientation is fixed by which pairs are opposite, so that is what is
/// compared. The circle is the circumcircle of the first three points.
template <typename Scalar>
bool classify_graceful(const QuadVertices<Scalar>& v) {
  const Vector2<Scalar> a = v.col(0), b = v.col(1), c = v.col(2);
  const Vector2<Scalar> ab = b - a, ac = c - a;
  const Scalar cross = ab(0) * ac(1) - ab(1) * ac(0);
  const Scalar scale = std::max(ab.squaredNorm(), ac.squaredNorm());
  if (!(std::abs(cross) > Scalar(1e-10) * scale)) {
    throw DegenerateConfiguration("circumcenter is ill-conditioned: nearly collinear vertices");
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if ((v.col(i) - v.col(j)).norm() <= Scalar(1e-12) * std::sqrt(scale)) {
        throw DegenerateConfiguration("coincident vertices");
      }
    }
  }
  const Scalar d = 2 * cross;
  const Vector2<Scalar> center =
      a + Vector2<Scalar>(ac(1) * ab.squaredNorm() - ab(1) * ac.squaredNorm(),
                          ab(0) * ac.squaredNorm() - ac(0) * ab.squaredNorm()) /
              d;

  auto opposite_of_first = [&v](const Vector2<Scalar>& about) {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::array<Scalar, 4> ang;
    for (int i = 0; i < 4; ++i) {
      const Vector2<Scalar> w = v.col(i) - about;
      ang[i] = std::atan2(w(1), w(0));
    }
    std::stable_sort(idx.begin(), idx.end(), [&ang](int i, int j) { return ang[i] < ang[j]; });
    const int pos = static_cast<int>(std::find(idx.begin(), idx.end(), 0) - idx.begin());
    return idx[(pos + 2) % 4];
  };
  return opposite_of_first(Vector2<Scalar>::Zero()) == opposite_of_first(center);
}

}  // namespace starpeg

#endif  // STARPEG_SQUARE_SPACE_HPP
