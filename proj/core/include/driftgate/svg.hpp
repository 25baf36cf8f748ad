#pragma once

#include <optional>
#include <string>
#include <vector>

namespace driftgate {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
  // Horizontal dashed guide (e.g. a significance level).
  std::optional<double> reference_y;
};

// Self-contained SVG line chart. The plot rect carries the axis ranges as
// data attributes and every marker carries the exact data values, so the
// pixel transform is invertible without re-reading the source CSV.
std::string render_line_chart(const ChartSpec& spec,
                              const std::vector<Series>& series);

void write_line_chart(const ChartSpec& spec, const std::vector<Series>& series,
                      const std::string& path);

}  // namespace driftgate
