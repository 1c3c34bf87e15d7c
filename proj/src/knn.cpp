#include "eeg4/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "eeg4/error.hpp"

namespace eeg4 {

KnnModel fit_knn(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, std::size_t k) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be positive");
  if (y.empty()) throw Error(ErrorCode::DegenerateTrainingSet, "no training rows");
  KnnModel model;
  model.k = k;
  model.classes = classes;
  model.rows = static_cast<std::size_t>(x.rows());
  model.cols = static_cast<std::size_t>(x.cols());
  model.train.resize(model.rows * model.cols);
  for (std::size_t f = 0; f < model.cols; ++f) {
    for (std::size_t i = 0; i < model.rows; ++i)
      model.train[f * model.rows + i] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
  }
  model.labels.assign(y.begin(), y.end());
  return model;
}

namespace {

// Squared distances from one query to every training row, summed feature by feature.
void squared_distances(const KnnModel& m, const double* query, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t f = 0; f < m.cols; ++f) {
    const double q = query[f];
    const double* col = m.train.data() + f * m.rows;
    for (std::size_t i = 0; i < m.rows; ++i) {
      const double diff = q - col[i];
      out[i] += diff * diff;
    }
  }
}

// k smallest (distance, row), lexicographic, kept sorted by insertion.
void select_nearest(const std::vector<double>& dist, std::size_t k, std::vector<std::pair<double, std::size_t>>& best) {
  best.clear();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double d = dist[i];
    if (best.size() == k && !(d < best.back().first)) continue;
    if (best.size() < k) best.emplace_back(d, i);
    else best.back() = {d, i};
    for (std::size_t j = best.size() - 1; j > 0 && best[j].first < best[j - 1].first; --j) std::swap(best[j], best[j - 1]);
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> KnnModel::neighbours(const FeatureMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != cols)
    throw Error(ErrorCode::DimensionMismatch, "KNN input width differs from training width");
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(x.rows()));
  std::vector<double> dist(rows);
  std::vector<std::pair<double, std::size_t>> best;
  const std::size_t kk = std::min(k, rows);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    squared_distances(*this, x.row(r).data(), dist);
    select_nearest(dist, kk, best);
    for (const auto& b : best) out[static_cast<std::size_t>(r)].push_back(b.second);
  }
  return out;
}

std::vector<int> KnnModel::predict(const FeatureMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != cols)
    throw Error(ErrorCode::DimensionMismatch, "KNN input width differs from training width");
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<double> dist(rows);
  std::vector<std::pair<double, std::size_t>> best;
  std::vector<int> votes(classes);
  std::vector<double> dist_sum(classes);
  const std::size_t kk = std::min(k, rows);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    squared_distances(*this, x.row(r).data(), dist);
    select_nearest(dist, kk, best);
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (const auto& [d, i] : best) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++votes[c];
      dist_sum[c] += std::sqrt(d);
    }
    std::size_t winner = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (votes[c] > votes[winner]) {
        winner = c;
      } else if (votes[c] == votes[winner] && votes[c] > 0 &&
                 dist_sum[c] / votes[c] < dist_sum[winner] / votes[winner]) {
        winner = c;
      }
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(winner);
  }
  return out;
}

nlohmann::json KnnModel::to_json() const {
  return {{"k", k}, {"classes", classes}, {"rows", rows}, {"cols", cols}, {"metric", "euclidean"}};
}

}  // namespace eeg4
