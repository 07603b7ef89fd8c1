#include "atomslab/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace atomslab {

namespace {

struct Sums {
  double sse = 0.0;
  double sum_y = 0.0;
  double sum_y_sq = 0.0;
  std::size_t count = 0;
};

Sums accumulate(const PredictionLog& log, int start, int end) {
  Sums s;
  for (const auto& p : log.periods) {
    if (p.period < start || p.period > end) continue;
    if (p.y_hat.size() != p.y.size())
      throw std::invalid_argument("prediction log has misaligned lengths");
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      const double e = p.y_hat[i] - p.y[i];
      s.sse += e * e;
      s.sum_y += p.y[i];
      s.sum_y_sq += p.y[i] * p.y[i];
      ++s.count;
    }
  }
  return s;
}

double sign(double v) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return 0.0;
}

} // namespace

double r2_zero(const PredictionLog& log, const RegimeWindow& window) {
  const Sums s = accumulate(log, window.start, window.end);
  if (s.count == 0) throw std::invalid_argument("empty evaluation window");
  if (s.sum_y_sq == 0.0) throw std::runtime_error("degenerate denominator: sum of y^2 is zero");
  return 1.0 - s.sse / s.sum_y_sq;
}

double r2_standard(const PredictionLog& log, const RegimeWindow& window) {
  const Sums s = accumulate(log, window.start, window.end);
  if (s.count < 2) throw std::invalid_argument("standard R^2 needs at least two observations");
  const double mean = s.sum_y / static_cast<double>(s.count);
  const double var = s.sum_y_sq - static_cast<double>(s.count) * mean * mean;
  if (var <= 0.0) throw std::runtime_error("degenerate denominator: zero response variance");
  return 1.0 - s.sse / var;
}

std::vector<AnnualEntry> annual_r2(const PredictionLog& log,
                                   const std::vector<std::string>& labels, R2Kind kind) {
  // Preserve first-appearance order of years along the period axis.
  std::vector<std::string> year_order;
  std::map<std::string, std::pair<int, int>> ranges; // year -> [min period, max period]
  for (const auto& p : log.periods) {
    std::string year;
    if (!labels.empty() && p.period >= 1 && p.period <= static_cast<int>(labels.size())) {
      const std::string& label = labels[static_cast<std::size_t>(p.period - 1)];
      year = label.substr(0, label.find('-'));
    } else {
      year = std::to_string((p.period - 1) / 12 + 1);
    }
    auto [it, inserted] = ranges.try_emplace(year, p.period, p.period);
    if (inserted) {
      year_order.push_back(year);
    } else {
      it->second.first = std::min(it->second.first, p.period);
      it->second.second = std::max(it->second.second, p.period);
    }
  }

  std::vector<AnnualEntry> out;
  for (const auto& year : year_order) {
    const auto& [start, end] = ranges.at(year);
    AnnualEntry entry;
    entry.year = year;
    try {
      const RegimeWindow window{year, start, end};
      entry.value = kind == R2Kind::ZeroBenchmark ? r2_zero(log, window)
                                                  : r2_standard(log, window);
    } catch (const std::runtime_error&) {
      // degenerate year: flagged, not fatal
    } catch (const std::invalid_argument&) {
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<double> wealth_curve(const PredictionLog& log) {
  std::vector<double> wealth;
  wealth.reserve(log.periods.size());
  double w = 1.0;
  for (const auto& p : log.periods) {
    if (p.y_hat.size() != p.y.size())
      throw std::invalid_argument("prediction log has misaligned lengths");
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      const double factor = 1.0 + p.y[i] * sign(p.y_hat[i]);
      if (factor <= 0.0)
        throw std::runtime_error("invalid wealth factor " + std::to_string(factor) +
                                 " at period " + std::to_string(p.period));
      w *= factor;
    }
    wealth.push_back(w);
  }
  return wealth;
}

double excess_ratio(double w_selected, double w_baseline) {
  if (!(w_baseline > 0.0)) throw std::invalid_argument("baseline wealth must be positive");
  return w_selected / w_baseline - 1.0;
}

} // namespace atomslab
