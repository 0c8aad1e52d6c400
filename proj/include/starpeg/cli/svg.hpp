#ifndef STARPEG_CLI_SVG_HPP
#define STARPEG_CLI_SVG_HPP

#include <string>

#include "starpeg/cli/report.hpp"

namespace starpeg::cli {

inline constexpr int kCurveSamples = 720;

/// Renders a result as SVG text. Peg results draw the curve (720 samples),
/// each square as a closed quadrilateral and its vertices as circle markers;
/// all geometry sits in data coordinates under a y-flipping transform, so a
/// marker's cx/cy are the vertex coordinates. Sphere results use an
/// orthographic view with a great-circle grid and the table points. Output is
/// a pure function of the document.
std::string render_svg(const ResultDocument& doc);

// Writes render_svg(doc) to `path`; throws std::runtime_error on I/O failure.
void emit_svg(const ResultDocument& doc, const std::string& path);

}  // namespace starpeg::cli

#endif  // STARPEG_CLI_SVG_HPP
