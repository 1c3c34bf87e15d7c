#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

/// Training features in column-major order with a per-feature ascending row order
/// (ties by row index). Built once per fit and shared by every tree grown on it.
class TrainingColumns {
 public:
  explicit TrainingColumns(const FeatureMatrix& x);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const double* column(std::size_t f) const { return values_.data() + f * rows_; }
  const std::uint32_t* order(std::size_t f) const { return order_.data() + f * rows_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::uint32_t> order_;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;       // classification leaves (class index)
  double value = 0.0;  // regression leaves
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t leaf_of(const double* x) const;
  int predict_label(const double* x) const { return nodes[leaf_of(x)].label; }
  double predict_value(const double* x) const { return nodes[leaf_of(x)].value; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& doc);
};

struct TreeParams {
  std::size_t max_depth = 0;           // 0 = grow until pure
  std::size_t min_split = 2;           // fewest distinct rows a node needs to be split
  std::size_t features_per_split = 0;  // 0 = every feature
};

/// CART classification tree: best weighted-Gini split over (feature, midpoint threshold);
/// ties go to the lowest feature, then the lowest threshold. Rows with zero weight are
/// ignored; `weights` empty means unit weights. `rng` is drawn from only when
/// features_per_split is below the feature count.
DecisionTree build_cart(const TrainingColumns& x, std::span<const int> y, std::size_t classes,
                        std::span<const double> weights, const TreeParams& params, std::mt19937_64* rng = nullptr);

/// Least-squares regression tree over every row (unit weights).
DecisionTree build_regression_tree(const TrainingColumns& x, std::span<const double> target,
                                   const TreeParams& params);

}  // namespace eeg4
