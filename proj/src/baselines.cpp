#include "atomslab/baselines.hpp"
#include "atomslab/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace atomslab {

BaselineChoice fixed_val(std::span<const FittedModel> candidates, const SplitPanel& validation,
                         int t, std::size_t window) {
  if (candidates.empty()) throw std::invalid_argument("fixed_val requires candidates");
  if (t < 2) throw std::invalid_argument("fixed_val requires t >= 2");
  if (window < 1) throw std::invalid_argument("fixed_val requires window >= 1");

  const int first = std::max(1, t - static_cast<int>(window));

  BaselineChoice choice;
  choice.window_used = static_cast<std::size_t>(t - first);
  choice.window_clamped = choice.window_used < window;
  choice.method = "fixed_val(" + std::to_string(window) + ")";
  choice.losses.assign(candidates.size(), 0.0);

  for (int j = first; j <= t - 1; ++j) {
    const auto& obs = validation.validation[static_cast<std::size_t>(j - 1)];
    for (const auto& o : obs) {
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double e = candidates[c].predict(o.x) - o.y;
        choice.losses[c] += e * e;
      }
    }
  }

  choice.chosen = static_cast<std::size_t>(
      std::min_element(choice.losses.begin(), choice.losses.end()) - choice.losses.begin());
  return choice;
}

FixedCvResult fixed_cv(const Panel& panel, int t, const GridConfig& grid, std::size_t folds,
                       std::uint64_t seed, std::size_t window) {
  if (t < 2) throw std::invalid_argument("fixed_cv requires t >= 2");
  if (folds < 2) throw std::invalid_argument("fixed_cv requires folds >= 2");

  const int first = std::max(1, t - static_cast<int>(window));
  std::vector<Observation> pool;
  for (int j = first; j <= t - 1; ++j) {
    const auto& obs = panel.periods[static_cast<std::size_t>(j - 1)].observations;
    pool.insert(pool.end(), obs.begin(), obs.end());
  }
  if (pool.size() < folds)
    throw std::runtime_error("fixed_cv requires at least " + std::to_string(folds) +
                             " observations, got " + std::to_string(pool.size()));

  // Seeded fold assignment: shuffle row indices, position i -> fold i mod folds.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 gen(seed);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t j = i + gen.next_below(order.size() - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> fold_of(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;

  const auto specs = grid.specifications();
  FixedCvResult result;
  result.specs = specs;
  result.choice.method = "fixed_cv";
  result.choice.window_used = static_cast<std::size_t>(t - first);
  result.choice.window_clamped = result.choice.window_used < window;
  result.choice.losses.assign(specs.size(), 0.0);

  for (std::size_t s = 0; s < specs.size(); ++s) {
    double mean_of_fold_mse = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<Observation> train_rows, test_rows;
      for (std::size_t i = 0; i < pool.size(); ++i)
        (fold_of[i] == f ? test_rows : train_rows).push_back(pool[i]);
      if (train_rows.empty() || test_rows.empty())
        throw std::runtime_error("fixed_cv produced an empty fold");
      const FittedModel model = fit_spec(specs[s], train_rows);
      double sse = 0.0;
      for (const auto& o : test_rows) {
        const double e = model.predict(o.x) - o.y;
        sse += e * e;
      }
      mean_of_fold_mse += sse / static_cast<double>(test_rows.size());
    }
    result.choice.losses[s] = mean_of_fold_mse / static_cast<double>(folds);
  }

  result.choice.chosen = static_cast<std::size_t>(
      std::min_element(result.choice.losses.begin(), result.choice.losses.end()) -
      result.choice.losses.begin());
  result.model = fit_spec(specs[result.choice.chosen], pool);
  return result;
}

} // namespace atomslab
