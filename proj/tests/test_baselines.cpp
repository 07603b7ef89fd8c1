#include "atomslab/baselines.hpp"
#include "atomslab/rng.hpp"
#include "atomslab/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace atomslab;

namespace {

FittedModel constant_model(double value) {
  FittedModel model;
  model.state = LinearState{(Eigen::VectorXd(2) << 0.0, value).finished()};
  return model;
}

SplitPanel synth_split(int periods, std::uint64_t seed) {
  synth::DriftEnv env;
  env.kind = synth::DriftKind::Stationary;
  env.gamma = 0.2;
  env.noise_sd = 0.3;
  env.samples_per_period = 5;
  env.seed = seed;
  const Panel panel = synth::generate(env, periods);
  return split(panel, 0.6, seed);
}

Panel linear_panel(int periods, int per_period, double slope, std::uint64_t seed) {
  Panel panel;
  panel.dimension = 1;
  SplitMix64 gen(seed);
  for (int t = 1; t <= periods; ++t) {
    PeriodBatch batch;
    batch.period = t;
    for (int i = 0; i < per_period; ++i) {
      Observation obs;
      const double x = gen.next_unit();
      obs.x = Eigen::VectorXd::Constant(1, x);
      obs.y = slope * x + 0.05 * gen.next_normal();
      batch.observations.push_back(std::move(obs));
    }
    panel.periods.push_back(std::move(batch));
  }
  return panel;
}

} // namespace

TEST_SUITE("baselines") {

TEST_CASE("fixed_val picks a zero-error candidate when one exists") {
  synth::DriftEnv env;
  env.kind = synth::DriftKind::Stationary;
  env.gamma = 0.0;
  env.noise_sd = 0.0;
  env.samples_per_period = 4;
  env.seed = 2;
  const Panel panel = synth::generate(env, 5); // y == 0
  const SplitPanel splits = split(panel, 0.5, 3);

  const std::vector<FittedModel> candidates = {constant_model(0.5), constant_model(0.0),
                                               constant_model(-0.25)};
  const BaselineChoice choice = fixed_val(candidates, splits, 5, 3);
  CHECK(choice.chosen == 1);
  CHECK(choice.losses[1] == 0.0);
}

TEST_CASE("fixed_val: any window at least t-1 behaves like t-1 exactly") {
  const SplitPanel splits = synth_split(6, 4);
  const std::vector<FittedModel> candidates = {constant_model(0.2), constant_model(-0.1)};
  const BaselineChoice exact = fixed_val(candidates, splits, 6, 5);
  const BaselineChoice clamped = fixed_val(candidates, splits, 6, 512);
  CHECK(exact.chosen == clamped.chosen);
  REQUIRE(exact.losses.size() == clamped.losses.size());
  for (std::size_t c = 0; c < exact.losses.size(); ++c)
    CHECK(exact.losses[c] == clamped.losses[c]);
  CHECK(clamped.window_clamped);
  CHECK_FALSE(exact.window_clamped);
}

TEST_CASE("fixed_val: hand-computed losses pick the second candidate") {
  // one period, one validation point with y = 1 at x = anything:
  // candidate predictions 0.5 / 1.2 -> losses 0.25 / 0.04
  Panel panel;
  panel.dimension = 1;
  for (int t = 1; t <= 2; ++t) {
    PeriodBatch batch;
    batch.period = t;
    for (int i = 0; i < 2; ++i) {
      Observation obs;
      obs.x = Eigen::VectorXd::Constant(1, 0.5);
      obs.y = 1.0;
      batch.observations.push_back(std::move(obs));
    }
    panel.periods.push_back(std::move(batch));
  }
  const SplitPanel splits = split(panel, 0.5, 1);
  const std::vector<FittedModel> candidates = {constant_model(0.5), constant_model(1.2)};
  const BaselineChoice choice = fixed_val(candidates, splits, 2, 1);
  CHECK(choice.chosen == 1);
  CHECK(choice.losses[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(choice.losses[1] == doctest::Approx(0.04).epsilon(1e-12)); // (1.2-1)^2
}

TEST_CASE("fixed_val loss table matches a naive double loop") {
  const SplitPanel splits = synth_split(8, 9);
  const std::vector<FittedModel> candidates = {constant_model(0.3), constant_model(0.0),
                                               constant_model(-0.2)};
  const std::size_t window = 4;
  const BaselineChoice choice = fixed_val(candidates, splits, 8, window);

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double loss = 0.0;
    for (int j = 8 - static_cast<int>(window); j <= 7; ++j)
      for (const auto& o : splits.validation[static_cast<std::size_t>(j - 1)]) {
        const double e = candidates[c].predict(o.x) - o.y;
        loss += e * e;
      }
    const double scale = std::max(1.0, std::abs(loss));
    CHECK(std::abs(choice.losses[c] - loss) <= 1e-12 * scale);
  }
}

TEST_CASE("fixed_cv: a single specification is chosen regardless of folds") {
  const Panel panel = linear_panel(10, 4, 0.6, 5);
  GridConfig grid;
  grid.ridge_alphas = {1.0};
  grid.lasso_alphas = {};
  grid.enet_alphas = {};
  grid.forest_trees = {};
  const FixedCvResult result = fixed_cv(panel, 10, grid, 5, 7);
  CHECK(result.choice.chosen == 0);
  CHECK(result.specs.size() == 1);
  CHECK(result.model.training_count > 0);
}

TEST_CASE("fixed_cv loss table equals an independent CV loop") {
  const Panel panel = linear_panel(8, 5, 0.4, 6);
  GridConfig grid;
  grid.ridge_alphas = {0.01, 10.0};
  grid.lasso_alphas = {};
  grid.enet_alphas = {};
  grid.forest_trees = {};
  const std::size_t folds = 5;
  const std::uint64_t seed = 123;
  const FixedCvResult result = fixed_cv(panel, 8, grid, folds, seed);

  // independent re-derivation: same documented fold assignment, own fit calls
  std::vector<Observation> pool;
  for (int j = 1; j <= 7; ++j)
    for (const auto& o : panel.periods[static_cast<std::size_t>(j - 1)].observations)
      pool.push_back(o);
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 gen(seed);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t j = i + gen.next_below(order.size() - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> fold_of(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;

  const auto specs = grid.specifications();
  for (std::size_t s = 0; s < specs.size(); ++s) {
    double mean_mse = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<Observation> train_rows, test_rows;
      for (std::size_t i = 0; i < pool.size(); ++i)
        (fold_of[i] == f ? test_rows : train_rows).push_back(pool[i]);
      const FittedModel model = fit_spec(specs[s], train_rows);
      double sse = 0.0;
      for (const auto& o : test_rows) {
        const double e = model.predict(o.x) - o.y;
        sse += e * e;
      }
      mean_mse += sse / static_cast<double>(test_rows.size());
    }
    mean_mse /= static_cast<double>(folds);
    CHECK(result.choice.losses[s] == doctest::Approx(mean_mse).epsilon(1e-12));
  }
}

TEST_CASE("fixed_cv: deterministic in the seed, short history is clamped") {
  const Panel panel = linear_panel(12, 4, 0.5, 8);
  GridConfig grid;
  grid.ridge_alphas = {0.1, 1.0};
  grid.lasso_alphas = {};
  grid.enet_alphas = {};
  grid.forest_trees = {};

  const FixedCvResult a = fixed_cv(panel, 12, grid, 5, 42);
  const FixedCvResult b = fixed_cv(panel, 12, grid, 5, 42);
  CHECK(a.choice.chosen == b.choice.chosen);
  CHECK(a.choice.losses == b.choice.losses);

  CHECK(a.choice.window_clamped); // only 11 periods of history against window 36
  CHECK(a.choice.window_used == 11);

  const FixedCvResult c = fixed_cv(panel, 12, grid, 5, 43);
  CHECK(c.choice.losses != a.choice.losses); // different folds, different table
}

TEST_CASE("fixed_cv rejects microscopic pools") {
  const Panel panel = linear_panel(2, 2, 0.5, 9);
  GridConfig grid;
  grid.ridge_alphas = {1.0};
  grid.lasso_alphas = {};
  grid.enet_alphas = {};
  grid.forest_trees = {};
  CHECK_THROWS_WITH_AS(fixed_cv(panel, 2, grid, 5, 1),
                       doctest::Contains("at least 5 observations"), std::runtime_error);
}

} // TEST_SUITE
