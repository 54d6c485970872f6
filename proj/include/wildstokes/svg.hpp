#pragma once

// svg.hpp
// Deterministic SVG ray diagrams of singular directions: one labeled ray per
// direction from the origin, supports annotated, byte-identical across runs
// for identical input.

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/io.hpp"
#include "wildstokes/stokescomb.hpp"

namespace wildstokes::svg {

inline std::string format_fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  if (std::fabs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0; // avoid "-0.00"
  s << v;
  return s.str();
}

inline std::string render_stokes_diagram(const std::vector<stokescomb::SingularDirection>& dirs) {
  if (dirs.empty()) throw malformed_input_error("no singular directions to draw");
  const int size = 520;
  const double cx = size / 2.0, cy = size / 2.0;
  const double ray = 200.0, label_at = 228.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  out << "  <circle cx=\"" << format_fixed(cx) << "\" cy=\"" << format_fixed(cy)
      << "\" r=\"3\" fill=\"black\"/>\n";
  for (const auto& d : dirs) {
    // mathematical orientation: y axis points up
    double x = cx + ray * std::cos(d.angle);
    double y = cy - ray * std::sin(d.angle);
    out << "  <line x1=\"" << format_fixed(cx) << "\" y1=\"" << format_fixed(cy) << "\" x2=\""
        << format_fixed(x) << "\" y2=\"" << format_fixed(y)
        << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    std::ostringstream label;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
      if (k) label << ", ";
      label << "(" << d.support[k].i + 1 << d.support[k].j + 1 << ")";
    }
    double lx = cx + label_at * std::cos(d.angle);
    double ly = cy - label_at * std::sin(d.angle);
    out << "  <text x=\"" << format_fixed(lx) << "\" y=\"" << format_fixed(ly)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << label.str() << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void emit_stokes_svg(const std::vector<stokescomb::SingularDirection>& dirs,
                            const std::filesystem::path& path) {
  io::write_file_atomic(path, render_stokes_diagram(dirs));
}

} // namespace wildstokes::svg
