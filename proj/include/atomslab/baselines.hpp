#pragma once

#include "atomslab/model_zoo.hpp"
#include "atomslab/panel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace atomslab {

// Outcome of a non-adaptive selector. `losses` records the criterion value
// per candidate (validation SSE for fixed_val, mean held-out fold MSE for
// fixed_cv); `chosen` minimizes it, ties to the smallest index.
struct BaselineChoice {
  std::string method;
  std::size_t chosen = 0;
  std::vector<double> losses;
  std::size_t window_used = 0;
  bool window_clamped = false; // requested window exceeded the history
};

// Picks the candidate with the least summed squared validation error over
// the trailing `window` periods, (t-window)∨1 .. t-1.
BaselineChoice fixed_val(std::span<const FittedModel> candidates, const SplitPanel& validation,
                         int t, std::size_t window);

struct FixedCvResult {
  BaselineChoice choice;
  FittedModel model;           // winner refit on all pooled data
  std::vector<ModelSpec> specs; // candidate specifications, grid order
};

// Five-fold cross-validation over the pooled raw observations of the
// trailing `window` periods (all of them when fewer are available, flagged
// via window_clamped). Candidates are the grid's specifications without the
// window dimension. Folds come from a seeded shuffle of the pooled rows:
// position i of the shuffled order goes to fold i mod folds.
FixedCvResult fixed_cv(const Panel& panel, int t, const GridConfig& grid, std::size_t folds,
                       std::uint64_t seed, std::size_t window = 36);

} // namespace atomslab
