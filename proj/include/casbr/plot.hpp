#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace casbr {

struct RmseSeries {
  std::string name;
  std::vector<double> values;  // index = time step
};

// Affine mapping from (step, value) to SVG pixel coordinates.
struct PlotLayout {
  double margin_left = 70.0;
  double margin_top = 20.0;
  double plot_width = 540.0;
  double plot_height = 330.0;
  double x_max = 1.0;  // largest step
  double y_max = 1.0;  // largest value

  double map_x(double step) const { return margin_left + step / x_max * plot_width; }
  double map_y(double value) const {
    return margin_top + (1.0 - value / y_max) * plot_height;
  }

  static PlotLayout fit(std::span<const RmseSeries> series) {
    PlotLayout layout;
    double xm = 1.0, ym = 0.0;
    for (const auto& s : series) {
      if (s.values.size() > 1) xm = std::max(xm, static_cast<double>(s.values.size() - 1));
      for (double v : s.values) ym = std::max(ym, v);
    }
    layout.x_max = xm;
    layout.y_max = ym > 0.0 ? ym : 1.0;
    return layout;
  }
};

inline std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// Self-contained SVG line chart: one polyline per series, axis labels, and a
// legend. Step on the x axis, RMSE on the y axis.
inline void emit_plot(std::span<const RmseSeries> series, std::ostream& out) {
  if (series.empty()) throw std::invalid_argument("emit_plot: no series to draw");
  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);
  PlotLayout layout = PlotLayout::fit(series);
  double width = layout.margin_left + layout.plot_width + 20.0;
  double height = layout.margin_top + layout.plot_height + 50.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  // axes
  double x0 = layout.margin_left, y0 = layout.margin_top + layout.plot_height;
  double x1 = layout.margin_left + layout.plot_width, y1 = layout.margin_top;
  out << "<line x1=\"" << format_coord(x0) << "\" y1=\"" << format_coord(y0)
      << "\" x2=\"" << format_coord(x1) << "\" y2=\"" << format_coord(y0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << format_coord(x0) << "\" y1=\"" << format_coord(y0)
      << "\" x2=\"" << format_coord(x0) << "\" y2=\"" << format_coord(y1)
      << "\" stroke=\"black\"/>\n";

  // ticks
  for (int i = 0; i <= 4; ++i) {
    double frac = i / 4.0;
    double xv = frac * layout.x_max;
    double yv = frac * layout.y_max;
    char label[32];
    out << "<line x1=\"" << format_coord(layout.map_x(xv)) << "\" y1=\"" << format_coord(y0)
        << "\" x2=\"" << format_coord(layout.map_x(xv)) << "\" y2=\"" << format_coord(y0 + 5)
        << "\" stroke=\"black\"/>\n";
    std::snprintf(label, sizeof(label), "%.3g", xv);
    out << "<text x=\"" << format_coord(layout.map_x(xv)) << "\" y=\"" << format_coord(y0 + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << label << "</text>\n";
    out << "<line x1=\"" << format_coord(x0 - 5) << "\" y1=\"" << format_coord(layout.map_y(yv))
        << "\" x2=\"" << format_coord(x0) << "\" y2=\"" << format_coord(layout.map_y(yv))
        << "\" stroke=\"black\"/>\n";
    std::snprintf(label, sizeof(label), "%.3g", yv);
    out << "<text x=\"" << format_coord(x0 - 8) << "\" y=\"" << format_coord(layout.map_y(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << label << "</text>\n";
  }

  // axis labels
  out << "<text x=\"" << format_coord(x0 + layout.plot_width / 2.0) << "\" y=\""
      << format_coord(y0 + 38) << "\" font-size=\"13\" text-anchor=\"middle\">step</text>\n";
  out << "<text x=\"16\" y=\"" << format_coord(layout.margin_top + layout.plot_height / 2.0)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << format_coord(layout.margin_top + layout.plot_height / 2.0) << ")\">RMSE</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < series[i].values.size(); ++t) {
      if (t) out << ' ';
      out << format_coord(layout.map_x(static_cast<double>(t))) << ','
          << format_coord(layout.map_y(series[i].values[t]));
    }
    out << "\"/>\n";
    // legend entry
    double ly = layout.margin_top + 14.0 * static_cast<double>(i) + 8.0;
    out << "<line x1=\"" << format_coord(x1 - 120) << "\" y1=\"" << format_coord(ly)
        << "\" x2=\"" << format_coord(x1 - 100) << "\" y2=\"" << format_coord(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << format_coord(x1 - 95) << "\" y=\"" << format_coord(ly + 4)
        << "\" font-size=\"11\">" << series[i].name << "</text>\n";
  }
  out << "</svg>\n";
}

inline void emit_plot_file(std::span<const RmseSeries> series,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot file: " + path.string());
  emit_plot(series, out);
}

}  // namespace casbr
