#pragma once

#include <optional>
#include <string>
#include <vector>

namespace atomslab {

// Minimal static SVG writers for report figures. No external services; the
// CSV/JSON outputs are the contract and these are best-effort diagnostics.

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<std::optional<double>> y; // gaps allowed
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

// One box per labelled sample set (median, quartile box, min/max whiskers).
void write_box_plot(const std::string& path, const std::string& title,
                    const std::string& y_label, const std::vector<std::string>& labels,
                    const std::vector<std::vector<double>>& samples);

} // namespace atomslab
