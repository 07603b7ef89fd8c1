#include "atomslab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace atomslab {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 460.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

void write_frame(std::ostream& out, const std::string& title, const std::string& x_label,
                 const std::string& y_label, const Range& xr, const Range& yr) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";
  out << "<text x=\"" << (kMarginLeft + (kWidth - kMarginRight - kMarginLeft) / 2) << "\" y=\""
      << kHeight - 12 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "font-family=\"sans-serif\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 18 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
  // axes
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
      << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
      << "\" stroke=\"black\"/>\n";
  // y ticks
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double v = yr.lo + frac * (yr.hi - yr.lo);
    const double y = kHeight - kMarginBottom - frac * (kHeight - kMarginTop - kMarginBottom);
    out << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(v)
        << "</text>\n";
  }
  // x ticks
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double v = xr.lo + frac * (xr.hi - xr.lo);
    const double x = kMarginLeft + frac * (kWidth - kMarginRight - kMarginLeft);
    out << "<line x1=\"" << x << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\"" << x
        << "\" y2=\"" << kHeight - kMarginBottom + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << kHeight - kMarginBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(v)
        << "</text>\n";
  }
}

double map_x(double v, const Range& r) {
  return kMarginLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginRight - kMarginLeft);
}

double map_y(double v, const Range& r) {
  return kHeight - kMarginBottom -
         (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginTop - kMarginBottom);
}

} // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("line chart requires at least one series");

  Range xr{1e300, -1e300}, yr{1e300, -1e300};
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!s.y[i]) continue;
      xr.expand(s.x[i]);
      yr.expand(*s.y[i]);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("line chart has no finite points");
  xr.pad();
  yr.pad();

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot: " + path);
  write_frame(out, title, x_label, y_label, xr, yr);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream points;
    bool open = false;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!series[s].y[i]) { // gap: break the polyline
        if (open) {
          out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" "
              << "points=\"" << points.str() << "\"/>\n";
          points.str("");
          open = false;
        }
        continue;
      }
      points << map_x(series[s].x[i], xr) << ',' << map_y(*series[s].y[i], yr) << ' ';
      open = true;
    }
    if (open)
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << points.str() << "\"/>\n";
    const double ly = kMarginTop + 16.0 * static_cast<double>(s);
    out << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kMarginRight + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kMarginRight + 34 << "\" y=\"" << ly + 4
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << series[s].name << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failure: " + path);
}

void write_box_plot(const std::string& path, const std::string& title,
                    const std::string& y_label, const std::vector<std::string>& labels,
                    const std::vector<std::vector<double>>& samples) {
  if (labels.size() != samples.size() || samples.empty())
    throw std::invalid_argument("box plot requires one label per sample set");

  Range yr{1e300, -1e300};
  for (const auto& s : samples)
    for (const double v : s) yr.expand(v);
  if (yr.lo > yr.hi) throw std::invalid_argument("box plot has no data");
  yr.pad();
  Range xr{0.0, static_cast<double>(samples.size())};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot: " + path);
  write_frame(out, title, "", y_label, xr, yr);

  for (std::size_t b = 0; b < samples.size(); ++b) {
    std::vector<double> sorted = samples[b];
    if (sorted.empty()) continue;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(sorted.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double center = map_x(static_cast<double>(b) + 0.5, xr);
    const double half = 0.3 * (kWidth - kMarginRight - kMarginLeft) /
                        static_cast<double>(samples.size()) / 2.0 * 2.0;
    const double q1 = map_y(quantile(0.25), yr), q2 = map_y(quantile(0.5), yr),
                 q3 = map_y(quantile(0.75), yr);
    const double wlo = map_y(sorted.front(), yr), whi = map_y(sorted.back(), yr);
    const char* color = kPalette[b % (sizeof(kPalette) / sizeof(kPalette[0]))];

    out << "<line x1=\"" << center << "\" y1=\"" << wlo << "\" x2=\"" << center << "\" y2=\""
        << whi << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << center - half << "\" y=\"" << q3 << "\" width=\"" << 2 * half
        << "\" height=\"" << q1 - q3 << "\" fill=\"" << color
        << "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << center - half << "\" y1=\"" << q2 << "\" x2=\"" << center + half
        << "\" y2=\"" << q2 << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << center << "\" y=\"" << kHeight - kMarginBottom + 30
        << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << labels[b]
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failure: " + path);
}

} // namespace atomslab
