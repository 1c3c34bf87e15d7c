#include "eeg4/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include "eeg4/ensemble.hpp"
#include "eeg4/error.hpp"
#include "eeg4/knn.hpp"
#include "eeg4/lda.hpp"
#include "eeg4/svm.hpp"

namespace eeg4 {

std::string_view algorithm_id(Algorithm a) {
  switch (a) {
    case Algorithm::Lda: return "lda";
    case Algorithm::ShrinkageLda: return "shrinkage_lda";
    case Algorithm::LinearSvm: return "linear_svm";
    case Algorithm::RbfSvm: return "rbf_svm";
    case Algorithm::Knn: return "knn";
    case Algorithm::DecisionTree: return "decision_tree";
    case Algorithm::RandomForest: return "random_forest";
    case Algorithm::AdaBoost: return "adaboost";
    case Algorithm::GradientBoost: return "gradient_boost";
  }
  return "unknown";
}

std::string_view algorithm_display_name(Algorithm a) {
  switch (a) {
    case Algorithm::Lda: return "LDA";
    case Algorithm::ShrinkageLda: return "Shrinkage LDA";
    case Algorithm::LinearSvm: return "Linear SVM";
    case Algorithm::RbfSvm: return "RBF SVM";
    case Algorithm::Knn: return "Nearest Neighbors";
    case Algorithm::DecisionTree: return "Decision Tree";
    case Algorithm::RandomForest: return "Random Forest";
    case Algorithm::AdaBoost: return "Adaboost";
    case Algorithm::GradientBoost: return "GradientBoost";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  std::string key;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  static const std::pair<std::string_view, Algorithm> aliases[] = {
      {"lda", Algorithm::Lda},
      {"lineardiscriminantanalysis", Algorithm::Lda},
      {"shrinkagelda", Algorithm::ShrinkageLda},
      {"ldashrinkage", Algorithm::ShrinkageLda},
      {"slda", Algorithm::ShrinkageLda},
      {"linearsvm", Algorithm::LinearSvm},
      {"svmlinear", Algorithm::LinearSvm},
      {"rbfsvm", Algorithm::RbfSvm},
      {"svmrbf", Algorithm::RbfSvm},
      {"knn", Algorithm::Knn},
      {"nearestneighbors", Algorithm::Knn},
      {"nearestneighbours", Algorithm::Knn},
      {"kneighbors", Algorithm::Knn},
      {"decisiontree", Algorithm::DecisionTree},
      {"dt", Algorithm::DecisionTree},
      {"randomforest", Algorithm::RandomForest},
      {"rf", Algorithm::RandomForest},
      {"adaboost", Algorithm::AdaBoost},
      {"ada", Algorithm::AdaBoost},
      {"gradientboost", Algorithm::GradientBoost},
      {"gradientboosting", Algorithm::GradientBoost},
      {"gb", Algorithm::GradientBoost},
      {"gbm", Algorithm::GradientBoost},
  };
  for (const auto& [alias, algo] : aliases) {
    if (key == alias) return algo;
  }
  return std::nullopt;
}

bool uses_standardization(Algorithm a) {
  switch (a) {
    case Algorithm::Lda:
    case Algorithm::ShrinkageLda:
    case Algorithm::LinearSvm:
    case Algorithm::RbfSvm:
    case Algorithm::Knn:
      return true;
    default:
      return false;
  }
}

nlohmann::json Hyperparameters::to_json() const {
  return {{"svm_c", svm_c},
          {"svm_gamma", svm_gamma},
          {"svm_tol", svm_tol},
          {"svm_max_iterations", svm_max_iterations},
          {"knn_k", knn_k},
          {"tree_max_depth", tree_max_depth},
          {"tree_min_split", tree_min_split},
          {"rf_trees", rf_trees},
          {"rf_features_per_split", rf_features_per_split},
          {"rf_bootstrap", rf_bootstrap},
          {"ada_stages", ada_stages},
          {"ada_learning_rate", ada_learning_rate},
          {"gb_stages", gb_stages},
          {"gb_depth", gb_depth},
          {"gb_learning_rate", gb_learning_rate}};
}

void ModelSpec::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  const Hyperparameters& h = hyper;
  if (!(h.svm_c > 0.0) || !std::isfinite(h.svm_c)) bad("svm C must be positive");
  if (!(h.svm_gamma >= 0.0) || !std::isfinite(h.svm_gamma)) bad("svm gamma must be non-negative");
  if (!(h.svm_tol > 0.0)) bad("svm tolerance must be positive");
  if (h.knn_k == 0) bad("knn k must be positive");
  if (h.tree_min_split < 2) bad("tree min_split must be at least 2");
  if (h.rf_trees == 0) bad("forest needs at least one tree");
  if (h.ada_stages == 0) bad("adaboost needs at least one stage");
  if (!(h.ada_learning_rate > 0.0)) bad("adaboost learning rate must be positive");
  if (h.gb_depth == 0) bad("gradient boosting depth must be positive");
  if (!(h.gb_learning_rate >= 0.0) || !std::isfinite(h.gb_learning_rate))
    bad("gradient boosting learning rate must be non-negative");
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    const double var = (x.col(f).array() - s.mean(f)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(f) = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  if (x.cols() != mean.size()) throw Error(ErrorCode::DimensionMismatch, "standardizer width differs from input");
  FeatureMatrix out = x;
  out.rowwise() -= mean;
  out.array().rowwise() /= scale.array();
  return out;
}

TrainedModel fit(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> y) {
  spec.validate();
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (x.rows() < 2) throw Error(ErrorCode::DegenerateTrainingSet, "fewer than two training rows");
  if (!x.allFinite()) throw Error(ErrorCode::DegenerateTrainingSet, "training features contain non-finite values");

  TrainedModel model;
  model.spec = spec;
  model.features = static_cast<std::size_t>(x.cols());
  model.classes.assign(y.begin(), y.end());
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
  if (model.classes.size() < 2)
    throw Error(ErrorCode::DegenerateTrainingSet, "training labels contain a single class");
  const std::size_t k = model.classes.size();

  std::vector<int> idx(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    idx[i] = static_cast<int>(std::lower_bound(model.classes.begin(), model.classes.end(), y[i]) - model.classes.begin());

  FeatureMatrix scaled;
  const FeatureMatrix* input = &x;
  if (uses_standardization(spec.algorithm)) {
    model.standardizer = Standardizer::fit(x);
    scaled = model.standardizer->apply(x);
    input = &scaled;
  }

  const Hyperparameters& h = spec.hyper;
  SmoOptions smo;
  smo.C = h.svm_c;
  smo.tol = h.svm_tol;
  smo.max_iterations = h.svm_max_iterations;
  TreeParams tree;
  tree.max_depth = h.tree_max_depth;
  tree.min_split = h.tree_min_split;

  switch (spec.algorithm) {
    case Algorithm::Lda:
    case Algorithm::ShrinkageLda: {
      const auto shrink = spec.algorithm == Algorithm::Lda ? LdaShrinkage::None : LdaShrinkage::LedoitWolf;
      model.classifier = std::make_shared<ClassifierOf<LdaModel>>(fit_lda(*input, idx, k, shrink));
      break;
    }
    case Algorithm::LinearSvm:
    case Algorithm::RbfSvm: {
      KernelSpec kernel;
      kernel.type = spec.algorithm == Algorithm::LinearSvm ? KernelType::Linear : KernelType::Rbf;
      kernel.gamma = h.svm_gamma;
      model.classifier = std::make_shared<ClassifierOf<MulticlassSvm>>(fit_multiclass_svm(*input, idx, k, kernel, smo));
      break;
    }
    case Algorithm::Knn:
      model.classifier = std::make_shared<ClassifierOf<KnnModel>>(fit_knn(*input, idx, k, h.knn_k));
      break;
    case Algorithm::DecisionTree:
      model.classifier = std::make_shared<ClassifierOf<ClassificationTree>>(fit_decision_tree(*input, idx, k, tree));
      break;
    case Algorithm::RandomForest: {
      ForestParams p;
      p.trees = h.rf_trees;
      p.features_per_split = h.rf_features_per_split;
      p.bootstrap = h.rf_bootstrap;
      p.tree = tree;
      model.classifier = std::make_shared<ClassifierOf<RandomForest>>(fit_random_forest(*input, idx, k, p, spec.seed));
      break;
    }
    case Algorithm::AdaBoost:
      model.classifier = std::make_shared<ClassifierOf<AdaBoost>>(
          fit_adaboost(*input, idx, k, {h.ada_stages, h.ada_learning_rate}));
      break;
    case Algorithm::GradientBoost:
      model.classifier = std::make_shared<ClassifierOf<GradientBoost>>(
          fit_gradient_boost(*input, idx, k, {h.gb_stages, h.gb_depth, h.gb_learning_rate}));
      break;
  }
  return model;
}

Labels predict(const TrainedModel& model, const FeatureMatrix& x) {
  if (!model.classifier) throw Error(ErrorCode::Internal, "model has not been fitted");
  if (static_cast<std::size_t>(x.cols()) != model.features)
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(model.features) + " features, got " +
                                                  std::to_string(x.cols()));
  const std::vector<int> idx =
      model.standardizer ? model.classifier->predict(model.standardizer->apply(x)) : model.classifier->predict(x);
  Labels out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = model.classes[static_cast<std::size_t>(idx[i])];
  return out;
}

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json doc = {{"format", "eeg4-model"},
                        {"version", 1},
                        {"algorithm", algorithm_id(spec.algorithm)},
                        {"hyperparameters", spec.hyper.to_json()},
                        {"seed", spec.seed},
                        {"features", features},
                        {"classes", classes},
                        {"standardizer", nullptr},
                        {"model", classifier ? classifier->to_json() : nlohmann::json()}};
  if (standardizer) {
    doc["standardizer"] = {{"mean", std::vector<double>(standardizer->mean.begin(), standardizer->mean.end())},
                           {"scale", std::vector<double>(standardizer->scale.begin(), standardizer->scale.end())}};
  }
  return doc;
}

}  // namespace eeg4
