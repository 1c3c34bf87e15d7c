#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "eeg4/tree.hpp"

namespace eeg4 {

struct ClassificationTree {
  DecisionTree tree;
  std::size_t classes = 0;

  std::vector<int> predict(const FeatureMatrix& x) const;
  nlohmann::json to_json() const;
};

ClassificationTree fit_decision_tree(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                                     const TreeParams& params);

struct ForestParams {
  std::size_t trees = 100;
  std::size_t features_per_split = 0;  // 0 = ceil(sqrt(d))
  bool bootstrap = true;
  TreeParams tree;
};

/// Bagged CART trees with per-node feature subsampling; hard majority vote, ties to the
/// lowest class index. Tree t is grown from derive_seed(seed, t).
struct RandomForest {
  std::vector<DecisionTree> trees;
  std::size_t classes = 0;

  std::vector<int> predict(const FeatureMatrix& x) const;
  nlohmann::json to_json() const;
};

RandomForest fit_random_forest(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                               const ForestParams& params, std::uint64_t seed);

struct BoostParams {
  std::size_t stages = 50;
  double learning_rate = 1.0;
};

/// Multi-class AdaBoost (SAMME) over depth-1 trees.
struct AdaBoost {
  std::vector<DecisionTree> stumps;
  std::vector<double> alphas;
  std::vector<double> errors;
  std::size_t classes = 0;

  std::vector<int> predict(const FeatureMatrix& x) const;
  nlohmann::json to_json() const;
};

AdaBoost fit_adaboost(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, const BoostParams& params);

struct GradientBoostParams {
  std::size_t stages = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
};

/// Gradient boosting on the multinomial deviance: one least-squares tree per class and
/// stage, leaves refit by a single Newton step.
struct GradientBoost {
  std::vector<double> init;                       // log class priors
  std::vector<std::vector<DecisionTree>> stages;  // stages[m][class]
  std::vector<double> train_deviance;             // mean deviance after each stage
  double learning_rate = 0.1;
  std::size_t classes = 0;

  Eigen::MatrixXd raw_scores(const FeatureMatrix& x) const;
  std::vector<int> predict(const FeatureMatrix& x) const;
  nlohmann::json to_json() const;
};

GradientBoost fit_gradient_boost(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                                 const GradientBoostParams& params);

}  // namespace eeg4
