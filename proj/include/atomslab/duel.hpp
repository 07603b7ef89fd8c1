#pragma once

#include "atomslab/gapscan.hpp"
#include "atomslab/model_zoo.hpp"
#include "atomslab/panel.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace atomslab {

// Result of one adaptive pairwise comparison. chosen_window is the least
// minimizer of phi_hat + psi_hat over the scanned windows;
// delta_hat_at_choice is the gap estimate at that window (R^2-scaled for the
// R^2 variant). The winner is f1 exactly when that estimate is <= 0, so
// callers should pass the incumbent/pivot as f1 for stable tie semantics.
struct DuelOutcome {
  std::size_t winner = 0;
  std::size_t loser = 0;
  std::size_t chosen_window = 0;
  double delta_hat_at_choice = 0.0;
  std::vector<GapScanRow> scan; // empty when keep_scan = false
};

// Adaptive rolling-window comparison under the MSE metric.
DuelOutcome duel_mse(const FittedModel& f1, const FittedModel& f2, const SplitPanel& validation,
                     int t, const ComparisonConfig& config, std::size_t id1 = 1,
                     std::size_t id2 = 2, bool keep_scan = true);

// Adaptive rolling-window comparison under the R^2 metric;
// second_moments[j-1] holds V_j for period j.
DuelOutcome duel_r2(const FittedModel& f1, const FittedModel& f2, const SplitPanel& validation,
                    std::span<const double> second_moments, int t,
                    const ComparisonConfig& config, std::size_t id1 = 1, std::size_t id2 = 2,
                    bool keep_scan = true);

// Shared decision step: picks the least minimizer of the score and applies
// the sign rule. Exposed for selectors built on precomputed scans.
DuelOutcome decide_from_scan(std::vector<GapScanRow>&& rows, std::size_t id1, std::size_t id2,
                             bool keep_scan);

} // namespace atomslab
