#pragma once

#include "atomslab/panel.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace atomslab {

enum class ModelFamily { Ridge, Lasso, ElasticNet, RandomForest };

std::string family_name(ModelFamily family);

struct RidgeParams {
  double alpha = 1.0;
};

struct LassoParams {
  double alpha = 1.0;
};

struct ElasticNetParams {
  double alpha = 1.0;
  double l1_ratio = 0.05; // r in (0,1): weight of the l1 penalty
};

struct ForestParams {
  int n_tree = 100;
  int max_depth = 5;
  std::uint64_t seed = 0;
};

using FamilyParams = std::variant<RidgeParams, LassoParams, ElasticNetParams, ForestParams>;

// A trainable specification: model family + hyperparameters + the training
// window exponent k, meaning a trailing window of 4^k ∧ (t-1) periods.
struct ModelSpec {
  FamilyParams params;
  int window_exponent = 0;

  ModelFamily family() const;
  std::string describe() const;      // e.g. "ridge(alpha=1)"
  std::string describe_full() const; // e.g. "ridge(alpha=1)/k=3"
};

struct CoordinateDescentOptions {
  double tolerance = 1e-8; // max coordinate change per sweep
  std::size_t max_iterations = 10000;
};

// Linear state: coefficients for the augmented covariate (x, 1), so theta has
// d+1 entries and the last one multiplies the constant.
struct LinearState {
  Eigen::VectorXd theta;
};

struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct ForestState {
  std::vector<RegressionTree> trees;
};

// A fitted predictor. Prediction is pure and safe to call concurrently.
struct FittedModel {
  ModelSpec spec;
  std::variant<LinearState, ForestState> state;
  int fit_period = 0;          // t at which the model was trained (0 = standalone fit)
  int effective_window = 0;    // 4^k ∧ (t-1)
  std::size_t training_count = 0;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  bool is_linear() const { return std::holds_alternative<LinearState>(state); }
  const Eigen::VectorXd& coefficients() const { return std::get<LinearState>(state).theta; }
};

// Ridge with the penalty applied to all d+1 coordinates, intercept included:
//   theta = argmin (1/n) sum (<theta, (x,1)> - y)^2 + alpha ||theta||_2^2,
// solved through the normal equations (X'X/n + alpha I) theta = X'y/n.
FittedModel fit_ridge(std::span<const Observation> data, double alpha);

// Lasso:
//   argmin (1/2)(1/n) sum (<theta, (x,1)> - y)^2 + alpha ||theta||_1,
// by cyclic coordinate descent. Throws on non-convergence, with the final
// worst KKT violation in the message.
FittedModel fit_lasso(std::span<const Observation> data, double alpha,
                      const CoordinateDescentOptions& options = {});

// Elastic net:
//   argmin (1/2)(1/n) sum (<theta, (x,1)> - y)^2
//          + alpha r ||theta||_1 + (alpha/2)(1-r) ||theta||_2^2.
FittedModel fit_elastic_net(std::span<const Observation> data, double alpha, double l1_ratio,
                            const CoordinateDescentOptions& options = {});

// Random forest regressor: n_tree trees, each grown on a seeded bootstrap
// resample (n draws with replacement from SplitMix64(substream_seed(seed,
// tree_index))), exact best-split search by variance reduction over all
// features and all midpoints of consecutive distinct sorted values, depth
// capped at max_depth, at least one sample per leaf. Ties in the split
// search go to the lowest feature index, then the lowest threshold.
FittedModel fit_forest(std::span<const Observation> data, int n_tree, int max_depth,
                       std::uint64_t seed);

// Fits a single spec on the given data (dispatch over the family).
FittedModel fit_spec(const ModelSpec& spec, std::span<const Observation> data);

// Hyperparameter grid for candidate construction. Defaults follow the
// reference configuration: five ridge alphas, five lasso alphas, 3x3 elastic
// net combinations, 3x3 forests, window exponents 0..5.
struct GridConfig {
  std::vector<double> ridge_alphas = {1e-3, std::pow(10.0, -1.5), 1.0, std::pow(10.0, 1.5), 1e3};
  std::vector<double> lasso_alphas = {1e-5, std::pow(10.0, -3.5), 1e-2, std::pow(10.0, -0.5), 1e1};
  std::vector<double> enet_alphas = {1e-3, 1.0, 1e3};
  std::vector<double> enet_ratios = {0.01, 0.05, 0.1};
  std::vector<int> forest_trees = {10, 100, 200};
  std::vector<int> forest_depths = {3, 5, 10};
  std::uint64_t forest_seed = 0;
  std::vector<int> window_exponents = {0, 1, 2, 3, 4, 5};

  // Specifications without the window dimension, in stable order
  // (ridge, lasso, elastic net, forest; hyperparameters in config order).
  std::vector<ModelSpec> specifications() const;
};

// All (specification, window) candidates for period t, fitted on the
// concatenated training observations of the trailing 4^k ∧ (t-1) periods.
// Requires t >= 2. Fit errors are rethrown tagged with the offending spec.
std::vector<FittedModel> build_candidate_grid(int t, const SplitPanel& splits,
                                              const GridConfig& config);

} // namespace atomslab
