#include "netres/plot.hpp"

#include <algorithm>
#include <cstdio>

namespace netres {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series) {
  std::size_t max_len = 1;
  for (const PlotSeries& s : series) max_len = std::max(max_len, s.values.size());
  const double x_max = static_cast<double>(max_len - 1);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x_max > 0 ? x / x_max : 0.0) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (1.0 - y) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
         std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kWidth / 2.0) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         escape_xml(title) + "</text>\n";

  // y grid at 0, 0.25, ..., 1
  for (int i = 0; i <= 4; ++i) {
    const double y = i * 0.25;
    svg += "<line x1=\"" + fmt(sx(0)) + "\" y1=\"" + fmt(sy(y)) + "\" x2=\"" +
           fmt(sx(x_max)) + "\" y2=\"" + fmt(sy(y)) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(kMarginLeft - 8.0) + "\" y=\"" + fmt(sy(y) + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(y) +
           "</text>\n";
  }
  // x ticks every 10 steps
  for (double x = 0; x <= x_max; x += 10.0) {
    svg += "<line x1=\"" + fmt(sx(x)) + "\" y1=\"" + fmt(sy(0)) + "\" x2=\"" + fmt(sx(x)) +
           "\" y2=\"" + fmt(sy(0) + 5.0) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(sx(x)) + "\" y=\"" + fmt(sy(0) + 18.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           std::to_string(static_cast<int>(x)) + "</text>\n";
  }

  svg += "<line x1=\"" + fmt(sx(0)) + "\" y1=\"" + fmt(sy(0)) + "\" x2=\"" + fmt(sx(x_max)) +
         "\" y2=\"" + fmt(sy(0)) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + fmt(sx(0)) + "\" y1=\"" + fmt(sy(0)) + "\" x2=\"" + fmt(sx(0)) +
         "\" y2=\"" + fmt(sy(1)) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + fmt(kMarginLeft + plot_w / 2.0) + "\" y=\"" +
         fmt(static_cast<double>(kHeight - 12)) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape_xml(x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(kMarginTop + plot_h / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         fmt(kMarginTop + plot_h / 2.0) + ")\">" + escape_xml(y_label) + "</text>\n";

  std::size_t color_index = 0;
  for (const PlotSeries& s : series) {
    if (s.values.empty()) continue;
    std::string points;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double y = std::clamp(s.values[i], 0.0, 1.0);
      if (i) points += ' ';
      points += fmt(sx(static_cast<double>(i))) + "," + fmt(sy(y));
    }
    const char* color = s.dashed ? "#999999" : kPalette[color_index++ % 10];
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.3\" opacity=\"0.85\"";
    if (s.dashed) svg += " stroke-dasharray=\"5,3\"";
    if (!s.label.empty()) svg += "><title>" + escape_xml(s.label) + "</title></polyline>\n";
    else svg += "/>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace netres
