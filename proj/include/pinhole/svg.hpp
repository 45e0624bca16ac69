#ifndef PINHOLE_SVG_HPP
#define PINHOLE_SVG_HPP

#include <string>
#include <vector>

namespace pinhole {

/// Minimal self-contained SVG line plot: one or more (x, y) series drawn as
/// polylines with point markers, linear axes with ticks. Output is a pure
/// function of the inputs (deterministic byte-for-byte).
struct SvgSeries {
  std::string label;
  std::string color;  // e.g. "#1f77b4"
  std::vector<double> x, y;
};

std::string render_line_plot(const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<SvgSeries>& series);

}  // namespace pinhole

#endif
