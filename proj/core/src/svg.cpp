#include "driftgate/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "driftgate/error.hpp"
#include "driftgate/format.hpp"

namespace driftgate {
namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 930.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 488.0;
constexpr std::size_t kMarkerLimit = 40;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;

  double to_px(double v) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

}  // namespace

std::string render_line_chart(const ChartSpec& spec,
                              const std::vector<Series>& series) {
  if (series.empty())
    raise(ErrorKind::empty_result, "chart has no series");
  std::size_t total_points = 0;
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    if (s.x.size() != s.y.size())
      raise(ErrorKind::bad_config, "series '" + s.name + "' x/y length mismatch");
    total_points += s.x.size();
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
  }
  if (total_points == 0)
    raise(ErrorKind::empty_result, "chart has no points");
  if (!(spec.y_min < spec.y_max))
    raise(ErrorKind::bad_config, "chart y range is empty");
  if (x_min == x_max) {
    x_min -= 0.5;
    x_max += 0.5;
  }

  const Axis xa{x_min, x_max, kLeft, kRight};
  const Axis ya{spec.y_min, spec.y_max, kBottom, kTop};  // y grows upward

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << format_double(kWidth) << "\" height=\"" << format_double(kHeight)
      << "\" viewBox=\"0 0 " << format_double(kWidth) << ' '
      << format_double(kHeight) << "\">\n";
  svg << "<rect width=\"" << format_double(kWidth) << "\" height=\""
      << format_double(kHeight) << "\" fill=\"#ffffff\"/>\n";
  svg << "<rect class=\"plot\" x=\"" << format_double(kLeft) << "\" y=\""
      << format_double(kTop) << "\" width=\"" << format_double(kRight - kLeft)
      << "\" height=\"" << format_double(kBottom - kTop)
      << "\" fill=\"none\" stroke=\"#444444\""
      << " data-x-min=\"" << format_double(x_min) << "\" data-x-max=\""
      << format_double(x_max) << "\" data-y-min=\"" << format_double(spec.y_min)
      << "\" data-y-max=\"" << format_double(spec.y_max) << "\"/>\n";

  svg << "<text x=\"" << format_double(kWidth / 2) << "\" y=\"24\""
      << " text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(spec.title) << "</text>\n";
  svg << "<text x=\"" << format_double((kLeft + kRight) / 2) << "\" y=\""
      << format_double(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"13\">" << escape_xml(spec.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << format_double((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
      << " transform=\"rotate(-90 18 " << format_double((kTop + kBottom) / 2)
      << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  // Ticks: five per axis at equal fractions.
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = x_min + f * (x_max - x_min);
    const double yv = spec.y_min + f * (spec.y_max - spec.y_min);
    const double px = xa.to_px(xv);
    const double py = ya.to_px(yv);
    svg << "<line x1=\"" << format_double(px) << "\" y1=\""
        << format_double(kBottom) << "\" x2=\"" << format_double(px)
        << "\" y2=\"" << format_double(kBottom + 5)
        << "\" stroke=\"#444444\"/>\n";
    svg << "<text x=\"" << format_double(px) << "\" y=\""
        << format_double(kBottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << format_double(xv) << "</text>\n";
    svg << "<line x1=\"" << format_double(kLeft - 5) << "\" y1=\""
        << format_double(py) << "\" x2=\"" << format_double(kLeft)
        << "\" y2=\"" << format_double(py) << "\" stroke=\"#444444\"/>\n";
    svg << "<text x=\"" << format_double(kLeft - 9) << "\" y=\""
        << format_double(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << format_double(yv) << "</text>\n";
  }

  if (spec.reference_y && *spec.reference_y >= spec.y_min &&
      *spec.reference_y <= spec.y_max) {
    const double py = ya.to_px(*spec.reference_y);
    svg << "<line class=\"reference\" x1=\"" << format_double(kLeft)
        << "\" y1=\"" << format_double(py) << "\" x2=\""
        << format_double(kRight) << "\" y2=\"" << format_double(py)
        << "\" stroke=\"#999999\" stroke-dasharray=\"6 4\" data-y=\""
        << format_double(*spec.reference_y) << "\"/>\n";
  }

  const bool markers = total_points <= kMarkerLimit * series.size() &&
                       total_points <= 4 * kMarkerLimit;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    if (s.x.empty()) continue;
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline class=\"series\" data-name=\"" << escape_xml(s.name)
        << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) svg << ' ';
      svg << format_double(xa.to_px(s.x[i])) << ','
          << format_double(ya.to_px(s.y[i]));
    }
    svg << "\"/>\n";
    if (markers && s.x.size() <= kMarkerLimit) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        svg << "<circle class=\"marker\" cx=\""
            << format_double(xa.to_px(s.x[i])) << "\" cy=\""
            << format_double(ya.to_px(s.y[i])) << "\" r=\"3\" fill=\"" << color
            << "\" data-x=\"" << format_double(s.x[i]) << "\" data-y=\""
            << format_double(s.y[i]) << "\"/>\n";
      }
    }
  }

  // Legend in the top-right corner of the plot area.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const double ly = kTop + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << format_double(kRight - 150) << "\" y1=\""
        << format_double(ly) << "\" x2=\"" << format_double(kRight - 122)
        << "\" y2=\"" << format_double(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << format_double(kRight - 116) << "\" y=\""
        << format_double(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(series[si].name) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_line_chart(const ChartSpec& spec, const std::vector<Series>& series,
                      const std::string& path) {
  const std::string text = render_line_chart(spec, series);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::io_error, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) raise(ErrorKind::io_error, "write failed for " + path);
}

}  // namespace driftgate
