#ifndef STARPEG_RADIAL_CURVE_HPP
#define STARPEG_RADIAL_CURVE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <utility>

#include "starpeg/errors.hpp"

namespace starpeg {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using CoeffVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kDefaultDegreeCap = 64;
inline constexpr int kPositivityGrid = 4096;

// Reduces an angle into [0, 2π).
template <typename Scalar>
Scalar reduce_angle(Scalar theta) {
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  Scalar r = std::fmod(theta, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0;
  return r;
}

// Signed difference a - b wrapped into [-π, π).
template <typename Scalar>
Scalar angle_difference(Scalar a, Scalar b) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return reduce_angle<Scalar>(a - b + pi) - pi;
}

template <typename Scalar>
struct RadialJet {
  Scalar value;
  Scalar first;
  Scalar second;
};

/// Positive function on the circle stored as a truncated Fourier series
///
///   h(θ) = Σ_k a_k cos kθ + Σ_k b_k sin kθ.
///
/// Both coefficient vectors are indexed by frequency k, so sin_coeffs(0) never
/// contributes. Values and the first two derivatives are exact trigonometric
/// sums; cos kθ and sin kθ come from the angle-addition recurrence on the
/// reduced angle.
template <typename Scalar>
class RadialFunction {
 public:
  using Coeffs = CoeffVector<Scalar>;

  RadialFunction() : cos_(Coeffs::Constant(1, Scalar(1))), sin_(Coeffs::Zero(1)) {}

  RadialFunction(Coeffs cos_coeffs, Coeffs sin_coeffs)
      : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    if (cos_.size() == 0) cos_ = Coeffs::Zero(1);
    if (!cos_.allFinite() || !sin_.allFinite()) {
      throw InvalidInput("radial function coefficients must be finite");
    }
  }

  static RadialFunction constant(Scalar c) {
    return RadialFunction(Coeffs::Constant(1, c), Coeffs::Zero(1));
  }

  const Coeffs& cos_coeffs() const { return cos_; }
  const Coeffs& sin_coeffs() const { return sin_; }

  // Highest frequency present (zero for constants).
  Eigen::Index degree() const {
    return std::max<Eigen::Index>(std::max<Eigen::Index>(cos_.size(), sin_.size()) - 1, 0);
  }

  Scalar operator()(Scalar theta) const { return jet(theta).value; }

  RadialJet<Scalar> jet(Scalar theta) const {
    const Scalar r = reduce_angle(theta);
    const Scalar c1 = std::cos(r);
    const Scalar s1 = std::sin(r);
    Scalar ck = 1, sk = 0;
    RadialJet<Scalar> out{cos_(0), 0, 0};
    const Eigen::Index n = degree();
    for (Eigen::Index k = 1; k <= n; ++k) {
      const Scalar cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
      const Scalar a = k < cos_.size() ? cos_(k) : Scalar(0);
      const Scalar b = k < sin_.size() ? sin_(k) : Scalar(0);
      const Scalar kk = Scalar(k);
      out.value += a * ck + b * sk;
      out.first += kk * (b * ck - a * sk);
      out.second -= kk * kk * (a * ck + b * sk);
    }
    return out;
  }

  Scalar derivative(Scalar theta) const { return jet(theta).first; }

  // Σ k(|a_k| + |b_k|), a global bound on |h'|.
  Scalar lipschitz_bound() const {
    Scalar bound = 0;
    for (Eigen::Index k = 1; k <= degree(); ++k) {
      const Scalar a = k < cos_.size() ? std::abs(cos_(k)) : Scalar(0);
      const Scalar b = k < sin_.size() ? std::abs(sin_(k)) : Scalar(0);
      bound += Scalar(k) * (a + b);
    }
    return bound;
  }

  // Coefficients padded to a common length degree()+1.
  std::pair<Coeffs, Coeffs> padded() const {
    const Eigen::Index n = degree() + 1;
    Coeffs a = Coeffs::Zero(n), b = Coeffs::Zero(n);
    a.head(cos_.size()) = cos_;
    b.head(sin_.size()) = sin_;
    b(0) = 0;
    return {a, b};
  }

 private:
  Coeffs cos_;
  Coeffs sin_;
};

using RadialFunctiond = RadialFunction<double>;

// (1 - s)·g + s·h, the straight-line homotopy between two radial functions.
template <typename Scalar>
RadialFunction<Scalar> blend(const RadialFunction<Scalar>& g, const RadialFunction<Scalar>& h,
                             Scalar s) {
  const Eigen::Index n = std::max(g.degree(), h.degree()) + 1;
  auto [ga, gb] = g.padded();
  auto [ha, hb] = h.padded();
  CoeffVector<Scalar> a = CoeffVector<Scalar>::Zero(n), b = CoeffVector<Scalar>::Zero(n);
  a.head(ga.size()) += (1 - s) * ga;
  b.head(gb.size()) += (1 - s) * gb;
  a.head(ha.size()) += s * ha;
  b.head(hb.size()) += s * hb;
  return RadialFunction<Scalar>(a, b);
}

// h - g, used for the homotopy velocity.
template <typename Scalar>
RadialFunction<Scalar> difference(const RadialFunction<Scalar>& h, const RadialFunction<Scalar>& g) {
  const Eigen::Index n = std::max(g.degree(), h.degree()) + 1;
  auto [ga, gb] = g.padded();
  auto [ha, hb] = h.padded();
  CoeffVector<Scalar> a = CoeffVector<Scalar>::Zero(n), b = CoeffVector<Scalar>::Zero(n);
  a.head(ha.size()) += ha;
  b.head(hb.size()) += hb;
  a.head(ga.size()) -= ga;
  b.head(gb.size()) -= gb;
  return RadialFunction<Scalar>(a, b);
}

template <typename Scalar>
RadialFunction<Scalar> scaled(const RadialFunction<Scalar>& h, Scalar factor) {
  return RadialFunction<Scalar>(factor * h.cos_coeffs(), factor * h.sin_coeffs());
}

template <typename Scalar>
Scalar evaluate(const RadialFunction<Scalar>& h, Scalar theta) {
  return h(theta);
}

template <typename Scalar>
struct PositivityCertificate {
  bool positive = false;
  Scalar certified_min = 0;  // grid minimum minus spacing × Lipschitz bound
  Scalar grid_min = 0;
  Scalar grid_argmin = 0;
  // First maximal run of grid cells whose certified bound fails the margin.
  std::optional<std::pair<Scalar, Scalar>> violation;
};

/// Certifies min h > margin from a uniform grid and the Lipschitz bound of the
/// series. Every θ lies within one grid spacing of a sample, so
/// h(θ) ≥ h(θ_j) - spacing·Σk(|a_k|+|b_k|).
template <typename Scalar>
PositivityCertificate<Scalar> validate_positive(const RadialFunction<Scalar>& h, Scalar margin,
                                                int grid = kPositivityGrid) {
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  const Scalar spacing = two_pi / Scalar(grid);
  const Scalar slack = spacing * h.lipschitz_bound();
  PositivityCertificate<Scalar> cert;
  cert.grid_min = std::numeric_limits<Scalar>::infinity();
  std::optional<Scalar> run_start;
  for (int j = 0; j <= grid; ++j) {
    const Scalar theta = spacing * Scalar(j);
    const bool bad = j < grid && h(theta) - slack <= margin;
    if (j < grid) {
      const Scalar v = h(theta);
      if (v < cert.grid_min) {
        cert.grid_min = v;
        cert.grid_argmin = theta;
      }
    }
    if (bad && !run_start) run_start = theta;
    if (!bad && run_start && !cert.violation) {
      cert.violation = std::make_pair(*run_start - spacing, theta);
    }
  }
  cert.certified_min = cert.grid_min - slack;
  cert.positive = cert.certified_min > margin;
  return cert;
}

/// Star-shaped curve γ(θ) = h(θ)·(cos θ, sin θ) for a certified-positive h.
template <typename Scalar>
class StarCurve {
 public:
  explicit StarCurve(RadialFunction<Scalar> radial, Scalar margin = Scalar(0))
      : radial_(std::move(radial)) {
    const auto cert = validate_positive(radial_, margin);
    if (!cert.positive) {
      throw InvalidInput("radial function is not certifiably positive");
    }
    min_radius_ = cert.certified_min;
  }

  const RadialFunction<Scalar>& radial() const { return radial_; }
  Scalar certified_min() const { return min_radius_; }

 private:
  RadialFunction<Scalar> radial_;
  Scalar min_radius_ = 0;
};

template <typename Scalar>
Vector2<Scalar> curve_point(const RadialFunction<Scalar>& h, Scalar theta) {
  const Scalar r = reduce_angle(theta);
  return h(r) * Vector2<Scalar>(std::cos(r), std::sin(r));
}

template <typename Scalar>
Vector2<Scalar> curve_point(const StarCurve<Scalar>& c, Scalar theta) {
  return curve_point(c.radial(), theta);
}

/// Least-squares Fourier fit of degree `degree` from `samples` equispaced
/// values. With samples > 2·degree the discrete sums are the exact
/// least-squares coefficients.
template <typename Scalar, typename Fn>
RadialFunction<Scalar> fit_radial(Fn&& fn, int degree, int samples) {
  if (samples <= 2 * degree) throw InvalidInput("fit needs more than 2*degree samples");
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  CoeffVector<Scalar> values(samples);
  for (int j = 0; j < samples; ++j) values(j) = fn(two_pi * Scalar(j) / Scalar(samples));
  CoeffVector<Scalar> a = CoeffVector<Scalar>::Zero(degree + 1);
  CoeffVector<Scalar> b = CoeffVector<Scalar>::Zero(degree + 1);
  for (int j = 0; j < samples; ++j) {
    const Scalar theta = two_pi * Scalar(j) / Scalar(samples);
    const Scalar c1 = std::cos(theta), s1 = std::sin(theta);
    Scalar ck = 1, sk = 0;
    a(0) += values(j);
    for (int k = 1; k <= degree; ++k) {
      const Scalar cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
      a(k) += values(j) * ck;
      b(k) += values(j) * sk;
    }
  }
  a(0) /= Scalar(samples);
  a.tail(degree) *= Scalar(2) / Scalar(samples);
  b.tail(degree) *= Scalar(2) / Scalar(samples);
  return RadialFunction<Scalar>(a, b);
}

// Max |fit - fn| over a uniform grid offset by half a cell from the origin.
template <typename Scalar, typename Fn>
Scalar fit_error(const RadialFunction<Scalar>& fit, Fn&& fn, int grid = 1024) {
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  Scalar err = 0;
  for (int j = 0; j < grid; ++j) {
    const Scalar theta = two_pi * (Scalar(j) + Scalar(0.5)) / Scalar(grid);
    err = std::max(err, std::abs(fit(theta) - fn(theta)));
  }
  return err;
}

/// Radial function of the ellipse x²/A² + y²/B² = 1,
///   r(θ) = AB / sqrt(B² cos²θ + A² sin²θ),
/// fitted by a degree-`degree` Fourier series. The defaults give the ellipse
/// v₁² + 2v₂² = 1 whose unique graceful square has half-width 1/√3.
template <typename Scalar>
RadialFunction<Scalar> ellipse_radial(Scalar semi_major = Scalar(1),
                                      Scalar semi_minor = Scalar(1) / std::sqrt(Scalar(2)),
                                      int degree = 48) {
  const Scalar A = semi_major, B = semi_minor;
  auto exact = [A, B](Scalar theta) {
    const Scalar c = std::cos(theta), s = std::sin(theta);
    return A * B / std::sqrt(B * B * c * c + A * A * s * s);
  };
  auto fit = fit_radial<Scalar>(exact, degree, 4 * degree + 8);
  // Drop coefficients that are pure round-off.
  auto a = fit.cos_coeffs();
  auto b = fit.sin_coeffs();
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (std::abs(a(k)) < Scalar(1e-17)) a(k) = 0;
    if (std::abs(b(k)) < Scalar(1e-17)) b(k) = 0;
  }
  return RadialFunction<Scalar>(a, b);
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random generic curve: a_0 = 1 and a_k, b_k uniform in [-ρ/k², ρ/k²].
/// ρ is halved until the certified minimum exceeds `min_floor`.
inline RadialFunctiond random_radial(std::uint64_t seed, int degree, double rho = 0.3,
                                     double min_floor = 0.2) {
  if (degree < 1) throw InvalidInput("random curve degree must be at least 1");
  for (int attempt = 0; attempt < 32; ++attempt, rho *= 0.5) {
    std::mt19937_64 rng(seed);
    CoeffVector<double> a = CoeffVector<double>::Zero(degree + 1);
    CoeffVector<double> b = CoeffVector<double>::Zero(degree + 1);
    a(0) = 1.0;
    for (int k = 1; k <= degree; ++k) {
      const double bound = rho / (double(k) * double(k));
      a(k) = bound * (2 * unit_uniform(rng) - 1);
      b(k) = bound * (2 * unit_uniform(rng) - 1);
    }
    RadialFunctiond h(a, b);
    if (validate_positive(h, min_floor).positive) return h;
  }
  throw InvalidInput("could not draw a random curve above the positivity floor");
}

}  // namespace starpeg

#endif  // STARPEG_RADIAL_CURVE_HPP
