#ifndef STARPEG_TESTS_FIXTURES_HPP
#define STARPEG_TESTS_FIXTURES_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles/peg_oracle.hpp"
#include "oracles/sphere_oracle.hpp"
#include "starpeg/radial_curve.hpp"
#include "starpeg/sphere_geometry.hpp"

namespace fixtures {

inline constexpr double kPi = std::numbers::pi;
inline const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

inline starpeg::RadialFunctiond ellipse() { return starpeg::ellipse_radial<double>(); }

inline starpeg::RadialFunctiond circle() { return starpeg::RadialFunctiond::constant(1.0); }

inline oracle::Radial to_oracle(const starpeg::RadialFunctiond& h) {
  oracle::Radial r;
  r.a.assign(h.cos_coeffs().data(), h.cos_coeffs().data() + h.cos_coeffs().size());
  r.b.assign(h.sin_coeffs().data(), h.sin_coeffs().data() + h.sin_coeffs().size());
  return r;
}

inline std::vector<starpeg::HarmonicTerm> even_terms(int which) {
  switch (which) {
    case 0:
      return {{2, 0, 1.0}, {2, 1, 0.6}, {2, -2, -0.4}, {4, 3, 0.3}, {4, -1, 0.25}, {0, 0, 0.2}};
    case 1:
      return {{2, 2, 0.8}, {2, -1, -0.5}, {2, 0, 0.3}, {4, 0, 0.4}, {4, 2, -0.2}};
    default:
      return {{2, -2, 0.7}, {2, 1, 0.4}, {4, 4, 0.35}, {4, -3, -0.3}, {6, 1, 0.15}, {0, 0, -0.5}};
  }
}

inline std::vector<starpeg::HarmonicTerm> odd_mixed_terms(int which) {
  switch (which) {
    case 0:
      return {{1, 1, 0.7}, {1, 0, 0.2}, {2, 0, 0.5}, {3, -2, 0.3}};
    default:
      return {{1, -1, 0.4}, {2, 2, 0.6}, {3, 1, -0.35}, {3, 3, 0.2}, {0, 0, 1.0}};
  }
}

inline starpeg::ScalarField even_field(int which) { return starpeg::ScalarField(even_terms(which), true); }

// Five fields for the great-circle case: the three even fixtures and two mixed-parity ones.
inline starpeg::ScalarField great_circle_field(int which) {
  if (which < 3) return even_field(which);
  return starpeg::ScalarField(odd_mixed_terms(which - 3), false);
}

inline std::vector<oracle::Term> to_oracle(const starpeg::ScalarField& f) {
  std::vector<oracle::Term> out;
  for (const auto& t : f.terms()) out.push_back({t.degree, t.order, t.coeff});
  return out;
}

inline oracle::Table to_oracle(const starpeg::TablePoints& p) {
  return {Eigen::Vector3d(p.col(0)), Eigen::Vector3d(p.col(1)), Eigen::Vector3d(p.col(2)),
          Eigen::Vector3d(p.col(3))};
}

// z² = 1/3 + (2/3)·P₂(z), written in the orthonormal basis.
inline starpeg::ScalarField z_squared() {
  const double sp = std::sqrt(kPi);
  return starpeg::ScalarField({{0, 0, 2 * sp / 3}, {2, 0, 4 * sp / (3 * std::sqrt(5.0))}}, true);
}

inline const std::vector<double> kRadii = {kPi / 12, kPi / 6, kPi / 4, kPi / 3, 0.99 * kPi / 2};

}  // namespace fixtures

#endif  // STARPEG_TESTS_FIXTURES_HPP
