#include "starpeg/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "starpeg/errors.hpp"

namespace starpeg {
namespace {

constexpr double kPi = std::numbers::pi;

int harmonic_index(int degree, int order) { return degree * degree + degree + order; }

}  // namespace

SpherePoint::SpherePoint(const Vector3d& v) {
  const double n = v.norm();
  if (!(n > 0) || !std::isfinite(n)) throw InvalidInput("sphere point needs a finite nonzero vector");
  p_ = v / n;
}

SpherePoint SpherePoint::antipode() const {
  SpherePoint q;
  q.p_ = -p_;
  return q;
}

TangentVector::TangentVector(const SpherePoint& base, const Vector3d& v)
    : base_(base), v_(v - v.dot(base.vec()) * base.vec()) {}

SpherePoint exp_map(const SpherePoint& x, const Vector3d& v) {
  return exp_map(TangentVector(x, v));
}

SpherePoint exp_map(const TangentVector& v) {
  const double len = v.norm();
  if (!(len < kPi)) {
    throw InjectivityRadiusExceeded("exponential map argument has length " + std::to_string(len) +
                                    " >= pi");
  }
  if (len == 0) return v.base();
  return SpherePoint(std::cos(len) * v.base().vec() + std::sin(len) * (v.vec() / len));
}

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
  // atan2 form stays accurate near 0 and π, unlike acos of the dot product.
  return std::atan2(a.vec().cross(b.vec()).norm(), a.vec().dot(b.vec()));
}

TangentFrame frame_at(const SpherePoint& x) {
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(x[i]) < std::abs(x[axis])) axis = i;
  }
  const Vector3d a = Vector3d::Unit(axis);
  TangentFrame f;
  f.e2 = x.vec().cross(a).normalized();
  f.e1 = f.e2.cross(x.vec());
  return f;
}

TangentFrame transport_frame(const TangentFrame& frame, const SpherePoint& y) {
  TangentFrame f;
  f.e1 = (frame.e1 - frame.e1.dot(y.vec()) * y.vec()).normalized();
  f.e2 = y.vec().cross(f.e1);
  return f;
}

Eigen::VectorXd real_harmonics_upto(int max_degree, const Vector3d& p) {
  const int L = max_degree;
  Eigen::VectorXd out = Eigen::VectorXd::Zero((L + 1) * (L + 1));
  const double x = p(0), y = p(1), z = p(2);
  // Re and Im of (x + iy)^m.
  std::vector<double> cm(L + 1), sm(L + 1);
  cm[0] = 1;
  sm[0] = 0;
  for (int m = 1; m <= L; ++m) {
    cm[m] = cm[m - 1] * x - sm[m - 1] * y;
    sm[m] = sm[m - 1] * x + cm[m - 1] * y;
  }
  std::vector<double> q(L + 1);
  double qmm = 1;  // (2m − 1)!!
  for (int m = 0; m <= L; ++m) {
    if (m > 0) qmm *= double(2 * m - 1);
    q[m] = qmm;
    if (m + 1 <= L) q[m + 1] = double(2 * m + 1) * z * qmm;
    for (int l = m + 2; l <= L; ++l) {
      q[l] = (double(2 * l - 1) * z * q[l - 1] - double(l + m - 1) * q[l - 2]) / double(l - m);
    }
    for (int l = m; l <= L; ++l) {
      double ratio = 1;  // (l − m)! / (l + m)!
      for (int k = l - m + 1; k <= l + m; ++k) ratio /= double(k);
      const double K = std::sqrt(double(2 * l + 1) / (4 * kPi) * ratio);
      if (m == 0) {
        out(harmonic_index(l, 0)) = K * q[l];
      } else {
        out(harmonic_index(l, m)) = std::numbers::sqrt2 * K * q[l] * cm[m];
        out(harmonic_index(l, -m)) = std::numbers::sqrt2 * K * q[l] * sm[m];
      }
    }
  }
  return out;
}

double real_harmonic(int degree, int order, const Vector3d& p) {
  if (degree < 0 || std::abs(order) > degree) throw InvalidInput("harmonic needs |m| <= l");
  return real_harmonics_upto(degree, p)(harmonic_index(degree, order));
}

ScalarField::ScalarField(std::vector<HarmonicTerm> terms, bool even_only, int degree_cap)
    : terms_(std::move(terms)), even_only_(even_only) {
  for (const auto& t : terms_) {
    if (t.degree < 0 || std::abs(t.order) > t.degree) {
      throw InvalidInput("harmonic term (" + std::to_string(t.degree) + ", " +
                         std::to_string(t.order) + ") needs |m| <= l");
    }
    if (t.degree > degree_cap) {
      throw InvalidInput("harmonic degree " + std::to_string(t.degree) + " exceeds cap " +
                         std::to_string(degree_cap));
    }
    if (!std::isfinite(t.coeff)) throw InvalidInput("harmonic coefficient must be finite");
    if (even_only_ && t.degree % 2 != 0) {
      throw InvalidInput("even field contains odd degree " + std::to_string(t.degree));
    }
    max_degree_ = std::max(max_degree_, t.degree);
  }
  dense_ = Eigen::VectorXd::Zero((max_degree_ + 1) * (max_degree_ + 1));
  for (const auto& t : terms_) dense_(harmonic_index(t.degree, t.order)) += t.coeff;
}

ScalarField ScalarField::constant(double value) {
  return ScalarField({{0, 0, value * 2 * std::sqrt(kPi)}}, true);
}

double ScalarField::operator()(const Vector3d& unit) const {
  if (dense_.size() == 0) return 0;
  return dense_.dot(real_harmonics_upto(max_degree_, unit));
}

double ScalarField::operator()(const SpherePoint& p) const { return (*this)(p.vec()); }

ScalarField ScalarField::shifted(double c) const {
  auto terms = terms_;
  terms.push_back({0, 0, c * 2 * std::sqrt(kPi)});
  return ScalarField(std::move(terms), even_only_, std::max(max_degree_, kDefaultHarmonicCap));
}

double ScalarField::sampled_min(int samples) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : fibonacci_sphere(samples)) m = std::min(m, (*this)(p));
  return m;
}

double field_eval(const ScalarField& f, const SpherePoint& p) { return f(p); }

std::vector<SpherePoint> fibonacci_sphere(int n) {
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(Vector3d(r * std::cos(phi), r * std::sin(phi), z));
  }
  return pts;
}

TablePoints table_points(const SpherePoint& x, const TangentFrame& frame, double a, double phi) {
  if (!(a > 0) || a > kPi / 2) {
    throw InvalidInput("table radius must satisfy 0 < a <= pi/2, got " + std::to_string(a));
  }
  const Vector3d d1 = std::cos(phi) * frame.e1 + std::sin(phi) * frame.e2;
  const Vector3d d2 = -std::sin(phi) * frame.e1 + std::cos(phi) * frame.e2;
  TablePoints pts;
  pts.col(0) = exp_map(x, a * d1).vec();
  pts.col(1) = exp_map(x, a * d2).vec();
  pts.col(2) = exp_map(x, -a * d1).vec();
  pts.col(3) = exp_map(x, -a * d2).vec();
  return pts;
}

TablePoints table_points(const SpherePoint& x, double a, double phi) {
  return table_points(x, frame_at(x), a, phi);
}

double point_set_distance(const TablePoints& a, const TablePoints& b) {
  auto directed = [](const TablePoints& p, const TablePoints& q) {
    double worst = 0;
    for (int i = 0; i < 4; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 4; ++j) best = std::min(best, (p.col(i) - q.col(j)).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double value_spread(const ScalarField& f, const TablePoints& points) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < 4; ++i) {
    const double v = f(Vector3d(points.col(i)));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double frame_angle_mod_quarter(const TangentFrame& frame, const Vector3d& d) {
  const double ang = std::atan2(d.dot(frame.e2), d.dot(frame.e1));
  double r = std::fmod(ang, kPi / 2);
  if (r < 0) r += kPi / 2;
  if (r >= kPi / 2) r = 0;
  return r;
}

TableSolution antipodal_transport(const ScalarField& f, const TableSolution& sol) {
  if (!f.even_only()) {
    throw EvennessRequired("antipodal transport needs an even field");
  }
  const TangentFrame frame = frame_at(sol.x);
  const Vector3d v_dir = std::cos(sol.phi) * frame.e1 + std::sin(sol.phi) * frame.e2;
  TableSolution out;
  out.x = sol.x.antipode();
  out.a = sol.a;
  out.phi = frame_angle_mod_quarter(frame_at(out.x), -v_dir);
  out.points = -sol.points;
  out.value_spread = value_spread(f, out.points);
  out.center_norm = sol.center_norm;
  return out;
}

}  // namespace starpeg
