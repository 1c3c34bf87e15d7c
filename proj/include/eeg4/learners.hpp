#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

enum class Algorithm {
  Lda,
  ShrinkageLda,
  LinearSvm,
  RbfSvm,
  Knn,
  DecisionTree,
  RandomForest,
  AdaBoost,
  GradientBoost,
};

inline constexpr std::array<Algorithm, 9> kAllAlgorithms{
    Algorithm::Lda,          Algorithm::ShrinkageLda, Algorithm::LinearSvm,
    Algorithm::RbfSvm,       Algorithm::Knn,          Algorithm::DecisionTree,
    Algorithm::RandomForest, Algorithm::AdaBoost,     Algorithm::GradientBoost};

std::string_view algorithm_id(Algorithm a);            // "random_forest"
std::string_view algorithm_display_name(Algorithm a);  // "Random Forest"
/// Accepts ids, display names and common abbreviations ("RF", "SVM-RBF"), case-insensitively.
std::optional<Algorithm> parse_algorithm(std::string_view text);
bool uses_standardization(Algorithm a);

struct Hyperparameters {
  double svm_c = 1.0;
  double svm_gamma = 0.0;  // 0 = scale
  double svm_tol = 1e-3;
  std::size_t svm_max_iterations = 0;
  std::size_t knn_k = 5;
  std::size_t tree_max_depth = 0;  // 0 = unlimited
  std::size_t tree_min_split = 2;
  std::size_t rf_trees = 100;
  std::size_t rf_features_per_split = 0;  // 0 = ceil(sqrt(d))
  bool rf_bootstrap = true;
  std::size_t ada_stages = 50;
  double ada_learning_rate = 1.0;
  std::size_t gb_stages = 100;
  std::size_t gb_depth = 3;
  double gb_learning_rate = 0.1;

  nlohmann::json to_json() const;
};

struct ModelSpec {
  Algorithm algorithm = Algorithm::RandomForest;
  Hyperparameters hyper;
  std::uint64_t seed = 0;

  void validate() const;  // InvalidConfig
};

/// Per-feature z-scoring fitted on training rows; near-constant features keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const FeatureMatrix& x);
  FeatureMatrix apply(const FeatureMatrix& x) const;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  /// Class indices into TrainedModel::classes.
  virtual std::vector<int> predict(const FeatureMatrix& x) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

template <class T>
class ClassifierOf final : public Classifier {
 public:
  explicit ClassifierOf(T model) : model_(std::move(model)) {}
  std::vector<int> predict(const FeatureMatrix& x) const override { return model_.predict(x); }
  nlohmann::json to_json() const override { return model_.to_json(); }
  const T& model() const { return model_; }

 private:
  T model_;
};

struct TrainedModel {
  ModelSpec spec;
  std::vector<int> classes;  // distinct training labels, ascending
  std::size_t features = 0;
  std::optional<Standardizer> standardizer;
  std::shared_ptr<const Classifier> classifier;

  /// The concrete model (LdaModel, MulticlassSvm, KnnModel, ClassificationTree, RandomForest,
  /// AdaBoost, GradientBoost) or nullptr when it is of another type.
  template <class T>
  const T* as() const {
    const auto* holder = dynamic_cast<const ClassifierOf<T>*>(classifier.get());
    return holder ? &holder->model() : nullptr;
  }

  nlohmann::json to_json() const;
};

/// DegenerateTrainingSet for fewer than two rows or classes; SingularCovariance from plain LDA.
TrainedModel fit(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> y);

/// Predicted labels (values from model.classes). DimensionMismatch on a width change.
Labels predict(const TrainedModel& model, const FeatureMatrix& x);

}  // namespace eeg4
