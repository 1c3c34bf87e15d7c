#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

/// Brute-force k nearest neighbours under Euclidean distance. Equal distances at the
/// k-th place are resolved by the lower training row; a tied vote goes to the class
/// with the smaller mean neighbour distance, then to the lower class index.
struct KnnModel {
  std::size_t k = 5;
  std::size_t classes = 0;
  std::vector<double> train;  // column-major, rows() values per feature
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> labels;

  /// Training rows of the k nearest neighbours of each query row, nearest first.
  std::vector<std::vector<std::size_t>> neighbours(const FeatureMatrix& x) const;
  std::vector<int> predict(const FeatureMatrix& x) const;
  nlohmann::json to_json() const;
};

KnnModel fit_knn(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, std::size_t k);

}  // namespace eeg4
