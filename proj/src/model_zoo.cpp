#include "atomslab/model_zoo.hpp"
#include "atomslab/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace atomslab {

namespace {

void check_inputs(std::span<const Observation> data) {
  if (data.empty()) throw std::invalid_argument("fit requires at least one observation");
  const Eigen::Index d = data[0].x.size();
  for (const auto& obs : data) {
    if (obs.x.size() != d) throw std::invalid_argument("inconsistent covariate dimension");
    if (!obs.x.allFinite() || !std::isfinite(obs.y))
      throw std::invalid_argument("non-finite value in training data");
  }
}

// Augmented design matrix (x, 1) and response.
void to_augmented(std::span<const Observation> data, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index d = data[0].x.size();
  x.resize(n, d + 1);
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i).head(d) = data[static_cast<std::size_t>(i)].x;
    x(i, d) = 1.0;
    y[i] = data[static_cast<std::size_t>(i)].y;
  }
}

double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

// Shared coordinate descent for lasso (l2_weight = 0) and elastic net.
// Minimizes (1/2)(1/n)||X theta - y||^2 + l1_weight ||theta||_1
//           + (l2_weight/2) ||theta||_2^2.
Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double l1_weight, double l2_weight,
                                   const CoordinateDescentOptions& options,
                                   const char* what) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd col_scale(p); // (1/n) ||x_c||^2
  for (Eigen::Index c = 0; c < p; ++c) col_scale[c] = x.col(c).squaredNorm() * inv_n;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = y; // y - X theta

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index c = 0; c < p; ++c) {
      const double old = theta[c];
      if (col_scale[c] == 0.0) {
        theta[c] = 0.0;
      } else {
        const double rho = x.col(c).dot(residual) * inv_n + col_scale[c] * old;
        theta[c] = soft_threshold(rho, l1_weight) / (col_scale[c] + l2_weight);
      }
      const double change = theta[c] - old;
      if (change != 0.0) {
        residual -= x.col(c) * change;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change < options.tolerance) return theta;
  }

  // Non-convergence: report the worst stationarity violation as a surrogate
  // for the duality gap.
  double violation = 0.0;
  const Eigen::VectorXd grad = -(x.transpose() * residual) * inv_n + l2_weight * theta;
  for (Eigen::Index c = 0; c < p; ++c) {
    const double v = theta[c] != 0.0
                         ? std::abs(grad[c] + l1_weight * (theta[c] > 0 ? 1.0 : -1.0))
                         : std::max(0.0, std::abs(grad[c]) - l1_weight);
    violation = std::max(violation, v);
  }
  std::ostringstream msg;
  msg << what << " did not converge after " << options.max_iterations
      << " sweeps; worst KKT violation " << violation;
  throw std::runtime_error(msg.str());
}

struct SplitDecision {
  int feature = -1;
  double threshold = 0.0;
  double children_sse = std::numeric_limits<double>::infinity();
};

// Exact search over all features and all midpoints between consecutive
// distinct values; minimizes the summed SSE of the two children.
SplitDecision find_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const std::vector<int>& rows) {
  SplitDecision best;
  const int n = static_cast<int>(rows.size());
  std::vector<int> order(rows.size());
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    order = rows;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (x(a, f) != x(b, f)) return x(a, f) < x(b, f);
      return a < b;
    });

    double left_sum = 0.0, left_sq = 0.0;
    double right_sum = 0.0, right_sq = 0.0;
    for (const int r : order) {
      right_sum += y[r];
      right_sq += y[r] * y[r];
    }

    for (int i = 0; i + 1 < n; ++i) {
      const double v = y[order[static_cast<std::size_t>(i)]];
      left_sum += v;
      left_sq += v * v;
      right_sum -= v;
      right_sq -= v * v;
      const double lo = x(order[static_cast<std::size_t>(i)], f);
      const double hi = x(order[static_cast<std::size_t>(i + 1)], f);
      if (lo == hi) continue;
      const double n_left = i + 1;
      const double n_right = n - i - 1;
      const double sse = (left_sq - left_sum * left_sum / n_left) +
                         (right_sq - right_sum * right_sum / n_right);
      const double threshold = 0.5 * (lo + hi);
      // Strict improvement only: features and thresholds are visited in
      // ascending order, so ties resolve to the lowest feature index, then
      // the lowest threshold.
      if (sse < best.children_sse) {
        best.feature = static_cast<int>(f);
        best.threshold = threshold;
        best.children_sse = sse;
      }
    }
  }
  return best;
}

int grow_tree(RegressionTree& tree, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              std::vector<int>&& rows, int depth, int max_depth) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  double mean = 0.0;
  for (const int r : rows) mean += y[r];
  mean /= static_cast<double>(rows.size());
  tree.nodes[node_id].value = mean;

  const bool pure = std::all_of(rows.begin(), rows.end(),
                                [&](int r) { return y[r] == y[rows.front()]; });
  if (depth >= max_depth || rows.size() < 2 || pure) return node_id;

  const SplitDecision split = find_best_split(x, y, rows);
  if (split.feature < 0) return node_id; // all feature values identical

  std::vector<int> left_rows, right_rows;
  for (const int r : rows) {
    if (x(r, split.feature) <= split.threshold)
      left_rows.push_back(r);
    else
      right_rows.push_back(r);
  }
  rows.clear();

  tree.nodes[node_id].feature = split.feature;
  tree.nodes[node_id].threshold = split.threshold;
  const int left = grow_tree(tree, x, y, std::move(left_rows), depth + 1, max_depth);
  const int right = grow_tree(tree, x, y, std::move(right_rows), depth + 1, max_depth);
  tree.nodes[node_id].left = left;
  tree.nodes[node_id].right = right;
  return node_id;
}

} // namespace

std::string family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::Ridge: return "ridge";
    case ModelFamily::Lasso: return "lasso";
    case ModelFamily::ElasticNet: return "elastic_net";
    case ModelFamily::RandomForest: return "random_forest";
  }
  return "unknown";
}

ModelFamily ModelSpec::family() const {
  if (std::holds_alternative<RidgeParams>(params)) return ModelFamily::Ridge;
  if (std::holds_alternative<LassoParams>(params)) return ModelFamily::Lasso;
  if (std::holds_alternative<ElasticNetParams>(params)) return ModelFamily::ElasticNet;
  return ModelFamily::RandomForest;
}

std::string ModelSpec::describe() const {
  std::ostringstream out;
  if (const auto* r = std::get_if<RidgeParams>(&params)) {
    out << "ridge(alpha=" << r->alpha << ")";
  } else if (const auto* l = std::get_if<LassoParams>(&params)) {
    out << "lasso(alpha=" << l->alpha << ")";
  } else if (const auto* e = std::get_if<ElasticNetParams>(&params)) {
    out << "elastic_net(alpha=" << e->alpha << ",r=" << e->l1_ratio << ")";
  } else {
    const auto& f = std::get<ForestParams>(params);
    out << "random_forest(n_tree=" << f.n_tree << ",d_max=" << f.max_depth << ")";
  }
  return out.str();
}

std::string ModelSpec::describe_full() const {
  return describe() + "/k=" + std::to_string(window_exponent);
}

double RegressionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(node)];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].value;
}

double FittedModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (const auto* linear = std::get_if<LinearState>(&state)) {
    const Eigen::Index d = linear->theta.size() - 1;
    if (x.size() != d) throw std::invalid_argument("prediction dimension mismatch");
    return linear->theta.head(d).dot(x) + linear->theta[d];
  }
  const auto& forest = std::get<ForestState>(state);
  double sum = 0.0;
  for (const auto& tree : forest.trees) sum += tree.predict(x);
  return sum / static_cast<double>(forest.trees.size());
}

FittedModel fit_ridge(std::span<const Observation> data, double alpha) {
  check_inputs(data);
  if (!(alpha > 0.0)) throw std::invalid_argument("ridge alpha must be positive");

  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  to_augmented(data, x, y);
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  Eigen::MatrixXd a = x.transpose() * x * inv_n;
  a.diagonal().array() += alpha;
  const Eigen::VectorXd b = x.transpose() * y * inv_n;

  FittedModel model;
  model.spec.params = RidgeParams{alpha};
  model.state = LinearState{a.ldlt().solve(b)};
  model.training_count = data.size();
  return model;
}

FittedModel fit_lasso(std::span<const Observation> data, double alpha,
                      const CoordinateDescentOptions& options) {
  check_inputs(data);
  if (!(alpha > 0.0)) throw std::invalid_argument("lasso alpha must be positive");

  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  to_augmented(data, x, y);

  FittedModel model;
  model.spec.params = LassoParams{alpha};
  model.state = LinearState{coordinate_descent(x, y, alpha, 0.0, options, "lasso")};
  model.training_count = data.size();
  return model;
}

FittedModel fit_elastic_net(std::span<const Observation> data, double alpha, double l1_ratio,
                            const CoordinateDescentOptions& options) {
  check_inputs(data);
  if (!(alpha > 0.0)) throw std::invalid_argument("elastic net alpha must be positive");
  if (!(l1_ratio > 0.0 && l1_ratio < 1.0))
    throw std::invalid_argument("elastic net l1_ratio must lie in (0, 1)");

  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  to_augmented(data, x, y);

  FittedModel model;
  model.spec.params = ElasticNetParams{alpha, l1_ratio};
  model.state = LinearState{coordinate_descent(x, y, alpha * l1_ratio, alpha * (1.0 - l1_ratio),
                                               options, "elastic net")};
  model.training_count = data.size();
  return model;
}

FittedModel fit_forest(std::span<const Observation> data, int n_tree, int max_depth,
                       std::uint64_t seed) {
  check_inputs(data);
  if (n_tree < 1) throw std::invalid_argument("n_tree must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");

  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  to_matrix(data, x, y);
  const int n = static_cast<int>(x.rows());

  ForestState forest;
  forest.trees.resize(static_cast<std::size_t>(n_tree));
  for (int tree_idx = 0; tree_idx < n_tree; ++tree_idx) {
    SplitMix64 gen(substream_seed(seed, static_cast<std::uint64_t>(tree_idx)));
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = static_cast<int>(gen.next_below(static_cast<std::uint64_t>(n)));
    grow_tree(forest.trees[static_cast<std::size_t>(tree_idx)], x, y, std::move(rows), 0,
              max_depth);
  }

  FittedModel model;
  model.spec.params = ForestParams{n_tree, max_depth, seed};
  model.state = std::move(forest);
  model.training_count = data.size();
  return model;
}

FittedModel fit_spec(const ModelSpec& spec, std::span<const Observation> data) {
  FittedModel model = std::visit(
      [&](const auto& p) -> FittedModel {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RidgeParams>) {
          return fit_ridge(data, p.alpha);
        } else if constexpr (std::is_same_v<T, LassoParams>) {
          return fit_lasso(data, p.alpha);
        } else if constexpr (std::is_same_v<T, ElasticNetParams>) {
          return fit_elastic_net(data, p.alpha, p.l1_ratio);
        } else {
          return fit_forest(data, p.n_tree, p.max_depth, p.seed);
        }
      },
      spec.params);
  model.spec = spec;
  return model;
}

std::vector<ModelSpec> GridConfig::specifications() const {
  std::vector<ModelSpec> specs;
  for (const double alpha : ridge_alphas) specs.push_back({RidgeParams{alpha}, 0});
  for (const double alpha : lasso_alphas) specs.push_back({LassoParams{alpha}, 0});
  for (const double alpha : enet_alphas)
    for (const double ratio : enet_ratios) specs.push_back({ElasticNetParams{alpha, ratio}, 0});
  for (const int trees : forest_trees)
    for (const int depth : forest_depths)
      specs.push_back({ForestParams{trees, depth, forest_seed}, 0});
  return specs;
}

std::vector<FittedModel> build_candidate_grid(int t, const SplitPanel& splits,
                                              const GridConfig& config) {
  if (t < 2) throw std::invalid_argument("candidate grid requires t >= 2");
  if (t - 1 > splits.period_count())
    throw std::invalid_argument("candidate grid requires history for periods 1..t-1");

  const auto specs = config.specifications();
  std::vector<FittedModel> grid;
  grid.reserve(specs.size() * config.window_exponents.size());

  for (const int k : config.window_exponents) {
    const int window = static_cast<int>(
        std::min<long long>(1LL << (2 * k), static_cast<long long>(t - 1))); // 4^k ∧ (t-1)
    std::vector<Observation> pool;
    for (int j = t - window; j <= t - 1; ++j) {
      const auto& obs = splits.train[static_cast<std::size_t>(j - 1)];
      pool.insert(pool.end(), obs.begin(), obs.end());
    }
    for (const auto& base : specs) {
      ModelSpec spec = base;
      spec.window_exponent = k;
      try {
        FittedModel model = fit_spec(spec, pool);
        model.fit_period = t;
        model.effective_window = window;
        grid.push_back(std::move(model));
      } catch (const std::exception& e) {
        throw std::runtime_error("candidate fit failed for " + spec.describe_full() + ": " +
                                 e.what());
      }
    }
  }
  return grid;
}

} // namespace atomslab
