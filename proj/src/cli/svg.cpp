#include "starpeg/cli/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "starpeg/radial_curve.hpp"

namespace starpeg::cli {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCanvas = 600;

std::string header(const ResultDocument& doc) {
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
      kCanvas);
  out += fmt::format("<title>{} ({})</title>\n", doc.command, doc.status);
  out += fmt::format("<rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n", kCanvas);
  return out;
}

std::string planar(const ResultDocument& doc) {
  std::string out = header(doc);
  if (!doc.curve || doc.curve->cos_coeffs.empty()) return out + "</svg>\n";
  const auto& c = *doc.curve;
  const RadialFunctiond h(Eigen::Map<const Eigen::VectorXd>(c.cos_coeffs.data(), c.cos_coeffs.size()),
                          Eigen::Map<const Eigen::VectorXd>(c.sin_coeffs.data(), c.sin_coeffs.size()));
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(kCurveSamples);
  double extent = 0;
  for (int i = 0; i < kCurveSamples; ++i) {
    const double theta = 2 * kPi * i / kCurveSamples;
    pts.push_back(curve_point(h, theta));
    extent = std::max(extent, pts.back().cwiseAbs().maxCoeff());
  }
  if (!(extent > 0)) extent = 1;
  const double scale = 0.45 * kCanvas / extent;
  const double marker = 0.012 * extent;

  out += fmt::format("<g transform=\"translate({0} {0}) scale({1:.12g} {2:.12g})\">\n", kCanvas / 2, scale,
                     -scale);
  out += "<line x1=\"" + fmt::format("{:.12g}", -extent) + "\" y1=\"0\" x2=\"" + fmt::format("{:.12g}", extent) +
         "\" y2=\"0\" stroke=\"#ccc\" vector-effect=\"non-scaling-stroke\"/>\n";
  out += "<line x1=\"0\" y1=\"" + fmt::format("{:.12g}", -extent) + "\" x2=\"0\" y2=\"" +
         fmt::format("{:.12g}", extent) + "\" stroke=\"#ccc\" vector-effect=\"non-scaling-stroke\"/>\n";
  out += "<polygon class=\"curve\" fill=\"none\" stroke=\"black\" vector-effect=\"non-scaling-stroke\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += fmt::format("{}{:.12g},{:.12g}", i ? " " : "", pts[i].x(), pts[i].y());
  }
  out += "\"/>\n";
  for (const auto& s : doc.squares) {
    out += "<polygon class=\"square\" fill=\"none\" stroke=\"#c0392b\" vector-effect=\"non-scaling-stroke\" points=\"";
    for (int i = 0; i < 4; ++i) {
      out += fmt::format("{}{:.12g},{:.12g}", i ? " " : "", s.vertices[i][0], s.vertices[i][1]);
    }
    out += "\"/>\n";
  }
  for (const auto& s : doc.squares) {
    for (const auto& v : s.vertices) {
      out += fmt::format("<circle class=\"vertex\" cx=\"{:.12g}\" cy=\"{:.12g}\" r=\"{:.12g}\" fill=\"#c0392b\"/>\n",
                         v[0], v[1], marker);
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

struct View {
  Eigen::Vector3d right, up, toward;
  double radius = 0.42 * kCanvas;
  Eigen::Vector2d project(const Eigen::Vector3d& p) const {
    return {kCanvas / 2.0 + radius * p.dot(right), kCanvas / 2.0 - radius * p.dot(up)};
  }
  bool front(const Eigen::Vector3d& p) const { return p.dot(toward) >= 0; }
};

View make_view() {
  const double az = -kPi / 3, el = 25 * kPi / 180;
  View v;
  v.toward = {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
  v.right = {-std::sin(az), std::cos(az), 0};
  v.up = {-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el)};
  return v;
}

// Polylines of the visible and hidden parts of a sampled path.
void split_path(std::string& out, const View& view, const std::vector<Eigen::Vector3d>& path,
                const std::string& front_style, const std::string& back_style) {
  std::string run;
  bool run_front = false;
  auto flush = [&] {
    if (run.empty()) return;
    out += fmt::format("<polyline fill=\"none\" {} points=\"{}\"/>\n", run_front ? front_style : back_style, run);
    run.clear();
  };
  for (std::size_t i = 0; i < path.size(); ++i) {
    const bool f = view.front(path[i]);
    const Eigen::Vector2d q = view.project(path[i]);
    const std::string pt = fmt::format("{:.3f},{:.3f}", q.x(), q.y());
    if (!run.empty() && f != run_front) {
      run += " " + pt;
      flush();
    }
    if (run.empty()) run_front = f;
    run += (run.empty() ? "" : " ") + pt;
  }
  flush();
}

std::vector<Eigen::Vector3d> geodesic(const Eigen::Vector3d& a, const Eigen::Vector3d& b, int n) {
  const double omega = std::atan2(a.cross(b).norm(), a.dot(b));
  std::vector<Eigen::Vector3d> out;
  for (int i = 0; i <= n; ++i) {
    const double s = double(i) / n;
    if (omega < 1e-12) {
      out.push_back(a);
    } else {
      out.push_back((std::sin((1 - s) * omega) * a + std::sin(s * omega) * b) / std::sin(omega));
    }
  }
  return out;
}

std::string sphere(const ResultDocument& doc) {
  std::string out = header(doc);
  const View view = make_view();
  out += fmt::format("<circle class=\"outline\" cx=\"{0}\" cy=\"{0}\" r=\"{1:.3f}\" fill=\"none\" stroke=\"black\"/>\n",
                     kCanvas / 2, view.radius);
  const std::string grid_front = "stroke=\"#999\" stroke-width=\"0.8\"";
  const std::string grid_back = "stroke=\"#ddd\" stroke-width=\"0.6\" stroke-dasharray=\"3 3\"";
  constexpr int kGridSamples = 180;
  for (int k = 0; k < 6; ++k) {
    const double lon = k * kPi / 6;
    std::vector<Eigen::Vector3d> circle;
    for (int i = 0; i <= kGridSamples; ++i) {
      const double t = 2 * kPi * i / kGridSamples;
      circle.emplace_back(std::sin(t) * std::cos(lon), std::sin(t) * std::sin(lon), std::cos(t));
    }
    split_path(out, view, circle, grid_front, grid_back);
  }
  std::vector<Eigen::Vector3d> equator;
  for (int i = 0; i <= kGridSamples; ++i) {
    const double t = 2 * kPi * i / kGridSamples;
    equator.emplace_back(std::cos(t), std::sin(t), 0);
  }
  split_path(out, view, equator, grid_front, grid_back);

  if (doc.sweep) {
    for (const auto& p : doc.sweep->points) {
      const Eigen::Vector3d x(p.x[0], p.x[1], p.x[2]);
      if (!view.front(x)) continue;
      const Eigen::Vector2d q = view.project(x);
      const char* fill = p.status != "ok" ? "#f39c12" : (p.parity == 1 ? "#27ae60" : "#c0392b");
      out += fmt::format("<circle class=\"sweep\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2.5\" fill=\"{}\"/>\n", q.x(), q.y(),
                         fill);
    }
  }
  const std::string edge_front = "stroke=\"#2c3e50\" stroke-width=\"1.2\"";
  const std::string edge_back = "stroke=\"#95a5a6\" stroke-width=\"0.8\" stroke-dasharray=\"4 2\"";
  for (const auto& t : doc.tables) {
    for (int i = 0; i < 4; ++i) {
      const auto& a = t.points[i];
      const auto& b = t.points[(i + 1) % 4];
      split_path(out, view, geodesic({a[0], a[1], a[2]}, {b[0], b[1], b[2]}, 32), edge_front, edge_back);
    }
  }
  for (const auto& t : doc.tables) {
    for (const auto& p : t.points) {
      const Eigen::Vector3d x(p[0], p[1], p[2]);
      const Eigen::Vector2d q = view.project(x);
      out += fmt::format(
          "<circle class=\"table-point\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"4\" fill=\"{}\" stroke=\"#c0392b\"/>\n",
          q.x(), q.y(), view.front(x) ? "#c0392b" : "none");
    }
  }
  return out + "</svg>\n";
}

}  // namespace

std::string render_svg(const ResultDocument& doc) {
  const auto cmd = parse_command(doc.command);
  if (cmd && is_peg_command(*cmd)) return planar(doc);
  return sphere(doc);
}

void emit_svg(const ResultDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open SVG output '" + path + "'");
  out << render_svg(doc);
  if (!out) throw std::runtime_error("failed writing SVG output '" + path + "'");
}

}  // namespace starpeg::cli
