#include "atomslab/duel.hpp"

#include <stdexcept>

namespace atomslab {

DuelOutcome decide_from_scan(std::vector<GapScanRow>&& rows, std::size_t id1, std::size_t id2,
                             bool keep_scan) {
  if (rows.empty()) throw std::invalid_argument("duel requires at least one scanned window");

  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].score < rows[best].score) best = i; // ties keep the smaller window

  DuelOutcome outcome;
  outcome.chosen_window = rows[best].window;
  outcome.delta_hat_at_choice = rows[best].delta_hat;
  const bool f1_wins = outcome.delta_hat_at_choice <= 0.0;
  outcome.winner = f1_wins ? id1 : id2;
  outcome.loser = f1_wins ? id2 : id1;
  if (keep_scan) outcome.scan = std::move(rows);
  return outcome;
}

DuelOutcome duel_mse(const FittedModel& f1, const FittedModel& f2, const SplitPanel& validation,
                     int t, const ComparisonConfig& config, std::size_t id1, std::size_t id2,
                     bool keep_scan) {
  const LossDifferenceStream stream = loss_difference_stream(f1, f2, validation, t);
  return decide_from_scan(gap_scan(stream, config), id1, id2, keep_scan);
}

DuelOutcome duel_r2(const FittedModel& f1, const FittedModel& f2, const SplitPanel& validation,
                    std::span<const double> second_moments, int t,
                    const ComparisonConfig& config, std::size_t id1, std::size_t id2,
                    bool keep_scan) {
  const LossDifferenceStream stream = loss_difference_stream(f1, f2, validation, t);
  return decide_from_scan(gap_scan_r2(stream, second_moments, config), id1, id2, keep_scan);
}

} // namespace atomslab
