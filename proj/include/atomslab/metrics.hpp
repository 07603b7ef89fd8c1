#pragma once

#include <optional>
#include <string>
#include <vector>

namespace atomslab {

// Out-of-sample predictions of one algorithm, aligned with the realized
// responses period by period.
struct PeriodPredictions {
  int period = 0;
  std::vector<double> y_hat;
  std::vector<double> y;
};

struct PredictionLog {
  std::string algorithm;
  std::vector<PeriodPredictions> periods;
};

// Inclusive period range, e.g. an NBER recession window.
struct RegimeWindow {
  std::string label;
  int start = 0;
  int end = 0;
};

// Zero-benchmark out-of-sample R^2 over the window:
//   1 - sum (y_hat - y)^2 / sum y^2.
// Throws on an empty window or a zero denominator.
double r2_zero(const PredictionLog& log, const RegimeWindow& window);

// Statistical R^2: 1 - sum (y_hat - y)^2 / sum (y - mean)^2, with the mean
// taken over the window. Requires at least two observations with nonzero
// variance.
double r2_standard(const PredictionLog& log, const RegimeWindow& window);

enum class R2Kind { ZeroBenchmark, Standard };

struct AnnualEntry {
  std::string year;
  std::optional<double> value; // empty when the denominator degenerates
};

// Groups periods into years and applies the selected metric per group. With
// calendar labels (one per panel period, 1-based), the year is the label up
// to the first '-'; without labels, fixed blocks of 12 periods are used.
std::vector<AnnualEntry> annual_r2(const PredictionLog& log,
                                   const std::vector<std::string>& labels, R2Kind kind);

// Cumulative wealth of the sign-trading strategy, one entry per logged
// period: W_t = W_{t-1} * prod_i (1 + y_i * sign(y_hat_i)), W_0 = 1 and
// sign(0) = 0 (no position). Throws if any factor is <= 0.
std::vector<double> wealth_curve(const PredictionLog& log);

// w_selected / w_baseline - 1.
double excess_ratio(double w_selected, double w_baseline);

} // namespace atomslab
