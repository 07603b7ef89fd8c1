#include "atomslab/gapscan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace atomslab {

namespace {

// psi_hat for the MSE metric; `scale` = M^2. The R^2 variant reuses this with
// v_hat and scale divided by the second-moment floor.
double psi_hat(std::size_t n, double v_hat, double scale, double log_term) {
  if (n <= 1) return 8.0 * scale;
  return v_hat * std::sqrt(2.0 * log_term / static_cast<double>(n)) +
         64.0 * scale * log_term / (3.0 * static_cast<double>(n - 1));
}

void fill_phi_and_score(std::vector<GapScanRow>& rows) {
  for (std::size_t l = 0; l < rows.size(); ++l) {
    double phi = 0.0;
    for (std::size_t i = 0; i <= l; ++i) {
      const double gap = std::abs(rows[l].delta_hat - rows[i].delta_hat) -
                         (rows[l].psi_hat + rows[i].psi_hat);
      phi = std::max(phi, gap);
    }
    rows[l].phi_hat = phi;
    rows[l].score = rows[l].phi_hat + rows[l].psi_hat;
  }
}

std::size_t scan_length(const LossDifferenceStream& stream, const ComparisonConfig& config) {
  if (stream.per_period.empty()) throw std::invalid_argument("scan requires a nonempty stream");
  std::size_t length = stream.per_period.size();
  if (config.max_lookback) length = std::min(length, *config.max_lookback);
  if (length == 0) throw std::invalid_argument("max_lookback must allow at least one window");
  return length;
}

void validate_config(const ComparisonConfig& config) {
  if (!(config.delta_prime > 0.0 && config.delta_prime < 1.0))
    throw std::invalid_argument("delta_prime must lie in (0, 1)");
  if (!(config.m_squared > 0.0)) throw std::invalid_argument("m_squared must be positive");
  if (!(config.v_floor > 0.0)) throw std::invalid_argument("v_floor must be positive");
}

} // namespace

LossDifferenceStream loss_difference_stream(const FittedModel& f1, const FittedModel& f2,
                                            const SplitPanel& validation, int t) {
  if (t < 2) throw std::invalid_argument("loss_difference_stream requires t >= 2");
  if (t - 1 > validation.period_count())
    throw std::invalid_argument("loss_difference_stream requires history for periods 1..t-1");

  LossDifferenceStream stream;
  stream.per_period.resize(static_cast<std::size_t>(t - 1));
  for (int j = 1; j <= t - 1; ++j) {
    const auto& obs = validation.validation[static_cast<std::size_t>(j - 1)];
    auto& u = stream.per_period[static_cast<std::size_t>(j - 1)];
    u.reserve(obs.size());
    for (const auto& o : obs) {
      const double e1 = f1.predict(o.x) - o.y;
      const double e2 = f2.predict(o.x) - o.y;
      u.push_back(e1 * e1 - e2 * e2);
    }
  }
  return stream;
}

std::vector<GapScanRow> gap_scan(const LossDifferenceStream& stream,
                                 const ComparisonConfig& config) {
  validate_config(config);
  const std::size_t length = scan_length(stream, config);
  const std::size_t total = stream.per_period.size();
  const double log_term = std::log(2.0 / config.delta_prime);

  std::vector<GapScanRow> rows(length);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t l = 1; l <= length; ++l) {
    // window l covers periods t-l..t-1, i.e. the last l entries
    for (const double u : stream.per_period[total - l]) {
      sum += u;
      sum_sq += u * u;
      ++n;
    }
    GapScanRow& row = rows[l - 1];
    row.window = l;
    row.n = n;
    row.delta_hat = sum / static_cast<double>(n);
    if (n >= 2) {
      const double ss = sum_sq - static_cast<double>(n) * row.delta_hat * row.delta_hat;
      row.v_hat = std::sqrt(std::max(0.0, ss) / static_cast<double>(n - 1));
    }
    row.psi_hat = psi_hat(n, row.v_hat.value_or(0.0), config.m_squared, log_term);
  }
  fill_phi_and_score(rows);
  return rows;
}

std::vector<GapScanRow> gap_scan_r2(const LossDifferenceStream& stream,
                                    std::span<const double> second_moments,
                                    const ComparisonConfig& config,
                                    R2ScanDiagnostics* diagnostics) {
  validate_config(config);
  const std::size_t length = scan_length(stream, config);
  const std::size_t total = stream.per_period.size();
  if (second_moments.size() < total)
    throw std::invalid_argument("second_moments must cover periods 1..t-1");
  const double log_term = std::log(2.0 / config.delta_prime);
  const double scale = config.m_squared / config.v_floor;

  std::vector<double> floored(second_moments.begin(), second_moments.begin() + total);
  for (std::size_t j = 0; j < total; ++j) {
    if (floored[j] < config.v_floor) {
      if (floored[j] <= 0.0 && diagnostics)
        diagnostics->clamped_periods.push_back(static_cast<int>(j + 1));
      floored[j] = config.v_floor;
    }
  }

  std::vector<GapScanRow> rows(length);
  double sum = 0.0, sum_sq = 0.0, weighted_v = 0.0;
  std::size_t n = 0;
  for (std::size_t l = 1; l <= length; ++l) {
    const std::size_t j = total - l;
    for (const double u : stream.per_period[j]) {
      sum += u;
      sum_sq += u * u;
      ++n;
    }
    weighted_v += static_cast<double>(stream.per_period[j].size()) * floored[j];

    GapScanRow& row = rows[l - 1];
    row.window = l;
    row.n = n;
    const double v_window = weighted_v / static_cast<double>(n);
    const double delta = sum / static_cast<double>(n);
    row.delta_hat = delta / v_window;
    if (n >= 2) {
      const double ss = sum_sq - static_cast<double>(n) * delta * delta;
      row.v_hat = std::sqrt(std::max(0.0, ss) / static_cast<double>(n - 1)) / v_window;
    }
    row.psi_hat = psi_hat(n, row.v_hat.value_or(0.0), scale, log_term);
  }
  fill_phi_and_score(rows);
  return rows;
}

std::vector<double> validation_second_moments(const SplitPanel& validation, int t) {
  if (t < 2) throw std::invalid_argument("validation_second_moments requires t >= 2");
  std::vector<double> moments(static_cast<std::size_t>(t - 1));
  for (int j = 1; j <= t - 1; ++j) {
    const auto& obs = validation.validation[static_cast<std::size_t>(j - 1)];
    double sum = 0.0;
    for (const auto& o : obs) sum += o.y * o.y;
    moments[static_cast<std::size_t>(j - 1)] =
        obs.empty() ? 0.0 : sum / static_cast<double>(obs.size());
  }
  return moments;
}

void write_scan_csv(std::ostream& out, std::span<const GapScanRow> rows) {
  out << "ell,n,delta_hat,v_hat,psi_hat,phi_hat,score\n";
  for (const auto& row : rows) {
    out << row.window << ',' << row.n << ',' << row.delta_hat << ',';
    if (row.v_hat)
      out << *row.v_hat;
    else
      out << "nan";
    out << ',' << row.psi_hat << ',' << row.phi_hat << ',' << row.score << '\n';
  }
}

} // namespace atomslab
