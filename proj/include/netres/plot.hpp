#pragma once

// Minimal SVG line plots for score-vs-perturbation-step curves. Output is a
// pure function of the input series: no timestamps, no external resources.

#include <string>
#include <vector>

namespace netres {

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // y per integer x starting at 0
  bool dashed = false;         // null-model styling
};

std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series);

}  // namespace netres
