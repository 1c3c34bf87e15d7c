#include "eeg4/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eeg4/error.hpp"
#include "eeg4/random.hpp"

namespace eeg4 {

namespace {

void check_shapes(const FeatureMatrix& x, std::span<const int> y, std::size_t classes) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (y.empty()) throw Error(ErrorCode::DegenerateTrainingSet, "no training rows");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes)
      throw Error(ErrorCode::Internal, "class index out of range");
  }
}

void check_width(const FeatureMatrix& x, std::size_t expected) {
  if (static_cast<std::size_t>(x.cols()) != expected)
    throw Error(ErrorCode::DimensionMismatch, "input width differs from training width");
}

std::size_t tree_width(const DecisionTree& t) {
  std::size_t width = 0;
  for (const auto& n : t.nodes) width = std::max(width, static_cast<std::size_t>(n.feature + 1));
  return width;
}

// Index of the largest entry, lowest index on ties.
template <class Range>
int argmax(const Range& values) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = c;
  }
  return static_cast<int>(best);
}

nlohmann::json trees_json(const std::vector<DecisionTree>& trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : trees) out.push_back(t.to_json());
  return out;
}

}  // namespace

ClassificationTree fit_decision_tree(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                                     const TreeParams& params) {
  check_shapes(x, y, classes);
  const TrainingColumns cols(x);
  TreeParams p = params;
  p.features_per_split = 0;
  return {build_cart(cols, y, classes, {}, p), classes};
}

std::vector<int> ClassificationTree::predict(const FeatureMatrix& x) const {
  check_width(x, std::max(tree_width(tree), static_cast<std::size_t>(x.cols())));
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] = tree.predict_label(x.row(r).data());
  return out;
}

nlohmann::json ClassificationTree::to_json() const {
  return {{"classes", classes}, {"depth", tree.depth()}, {"leaves", tree.leaf_count()}, {"tree", tree.to_json()}};
}

RandomForest fit_random_forest(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                               const ForestParams& params, std::uint64_t seed) {
  check_shapes(x, y, classes);
  if (params.trees == 0) throw Error(ErrorCode::InvalidConfig, "forest needs at least one tree");
  const TrainingColumns cols(x);
  const std::size_t n = cols.rows();
  TreeParams tp = params.tree;
  tp.features_per_split = params.features_per_split > 0
                              ? params.features_per_split
                              : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cols.cols()))));

  RandomForest forest;
  forest.classes = classes;
  forest.trees.reserve(params.trees);
  std::vector<double> weights(n);
  for (std::size_t t = 0; t < params.trees; ++t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    if (params.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (std::size_t i = 0; i < n; ++i) weights[draw(rng)] += 1.0;
    } else {
      std::fill(weights.begin(), weights.end(), 1.0);
    }
    forest.trees.push_back(build_cart(cols, y, classes, weights, tp, &rng));
  }
  return forest;
}

std::vector<int> RandomForest::predict(const FeatureMatrix& x) const {
  std::size_t width = 0;
  for (const auto& t : trees) width = std::max(width, tree_width(t));
  if (static_cast<std::size_t>(x.cols()) < width)
    throw Error(ErrorCode::DimensionMismatch, "input width differs from training width");
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<int> votes(classes);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& t : trees) ++votes[static_cast<std::size_t>(t.predict_label(x.row(r).data()))];
    out[static_cast<std::size_t>(r)] = argmax(votes);
  }
  return out;
}

nlohmann::json RandomForest::to_json() const {
  return {{"classes", classes}, {"trees", trees_json(trees)}};
}

AdaBoost fit_adaboost(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, const BoostParams& params) {
  check_shapes(x, y, classes);
  if (params.stages == 0) throw Error(ErrorCode::InvalidConfig, "boosting needs at least one stage");
  if (!(params.learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be positive");
  const TrainingColumns cols(x);
  const std::size_t n = cols.rows();
  const double k = static_cast<double>(classes);
  TreeParams stump;
  stump.max_depth = 1;

  AdaBoost model;
  model.classes = classes;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<char> wrong(n);
  for (std::size_t m = 0; m < params.stages; ++m) {
    DecisionTree tree = build_cart(cols, y, classes, w, stump);
    double err = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wrong[i] = tree.predict_label(x.row(static_cast<Eigen::Index>(i)).data()) != y[i];
      if (wrong[i]) err += w[i];
      total += w[i];
    }
    err /= total;
    if (err <= 0.0) {
      model.stumps.push_back(std::move(tree));
      model.alphas.push_back(1.0);
      model.errors.push_back(0.0);
      break;
    }
    if (err >= 1.0 - 1.0 / k) {
      // No better than chance: stop, keeping this learner only if it would be the sole one.
      if (model.stumps.empty()) {
        model.stumps.push_back(std::move(tree));
        model.alphas.push_back(1.0);
        model.errors.push_back(err);
      }
      break;
    }
    const double alpha = params.learning_rate * (std::log((1.0 - err) / err) + std::log(k - 1.0));
    model.stumps.push_back(std::move(tree));
    model.alphas.push_back(alpha);
    model.errors.push_back(err);
    if (m + 1 == params.stages) break;
    double sum = 0.0;
    const double boost = std::exp(alpha);
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= boost;
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
  return model;
}

std::vector<int> AdaBoost::predict(const FeatureMatrix& x) const {
  std::size_t width = 0;
  for (const auto& t : stumps) width = std::max(width, tree_width(t));
  if (static_cast<std::size_t>(x.cols()) < width)
    throw Error(ErrorCode::DimensionMismatch, "input width differs from training width");
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<double> score(classes);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::fill(score.begin(), score.end(), 0.0);
    for (std::size_t m = 0; m < stumps.size(); ++m)
      score[static_cast<std::size_t>(stumps[m].predict_label(x.row(r).data()))] += alphas[m];
    out[static_cast<std::size_t>(r)] = argmax(score);
  }
  return out;
}

nlohmann::json AdaBoost::to_json() const {
  return {{"classes", classes}, {"alphas", alphas}, {"errors", errors}, {"stumps", trees_json(stumps)}};
}

namespace {

// Softmax of each row in place; returns the mean multinomial deviance against y.
double softmax_deviance(Eigen::MatrixXd& scores, std::span<const int> y) {
  double deviance = 0.0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double top = scores.row(r).maxCoeff();
    const double log_norm = top + std::log((scores.row(r).array() - top).exp().sum());
    deviance -= scores(r, y[static_cast<std::size_t>(r)]) - log_norm;
    scores.row(r) = (scores.row(r).array() - log_norm).exp();
  }
  return 2.0 * deviance / static_cast<double>(scores.rows());
}

}  // namespace

GradientBoost fit_gradient_boost(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                                 const GradientBoostParams& params) {
  check_shapes(x, y, classes);
  if (!(params.learning_rate >= 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be non-negative");
  const TrainingColumns cols(x);
  const std::size_t n = cols.rows();
  const auto rows = static_cast<Eigen::Index>(n);
  const auto k = static_cast<Eigen::Index>(classes);

  GradientBoost model;
  model.classes = classes;
  model.learning_rate = params.learning_rate;
  std::vector<double> counts(classes, 0.0);
  for (int label : y) counts[static_cast<std::size_t>(label)] += 1.0;
  model.init.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    // An absent class gets a large negative prior rather than -inf.
    model.init[c] = counts[c] > 0 ? std::log(counts[c] / static_cast<double>(n)) : std::log(1e-300);
  }

  Eigen::MatrixXd raw(rows, k);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < k; ++c) raw(r, c) = model.init[static_cast<std::size_t>(c)];
  if (params.learning_rate == 0.0) return model;

  TreeParams tp;
  tp.max_depth = params.max_depth;
  const double newton_scale = (static_cast<double>(classes) - 1.0) / static_cast<double>(classes);
  std::vector<double> residual(n);
  std::vector<std::size_t> leaf(n);
  for (std::size_t m = 0; m < params.stages; ++m) {
    Eigen::MatrixXd prob = raw;
    softmax_deviance(prob, y);
    std::vector<DecisionTree> stage;
    stage.reserve(classes);
    for (Eigen::Index c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i)
        residual[i] = (y[i] == c ? 1.0 : 0.0) - prob(static_cast<Eigen::Index>(i), c);
      DecisionTree tree = build_regression_tree(cols, residual, tp);
      std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        leaf[i] = tree.leaf_of(x.row(static_cast<Eigen::Index>(i)).data());
        const double p = prob(static_cast<Eigen::Index>(i), c);
        num[leaf[i]] += residual[i];
        den[leaf[i]] += p * (1.0 - p);
      }
      for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
        if (tree.nodes[node].feature >= 0) continue;
        tree.nodes[node].value = std::abs(den[node]) < 1e-150 ? 0.0 : newton_scale * num[node] / den[node];
      }
      for (std::size_t i = 0; i < n; ++i)
        raw(static_cast<Eigen::Index>(i), c) += params.learning_rate * tree.nodes[leaf[i]].value;
      stage.push_back(std::move(tree));
    }
    model.stages.push_back(std::move(stage));
    Eigen::MatrixXd after = raw;
    model.train_deviance.push_back(softmax_deviance(after, y));
  }
  return model;
}

Eigen::MatrixXd GradientBoost::raw_scores(const FeatureMatrix& x) const {
  std::size_t width = 0;
  for (const auto& stage : stages)
    for (const auto& t : stage) width = std::max(width, tree_width(t));
  if (static_cast<std::size_t>(x.cols()) < width)
    throw Error(ErrorCode::DimensionMismatch, "input width differs from training width");
  const auto k = static_cast<Eigen::Index>(classes);
  Eigen::MatrixXd raw(x.rows(), k);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      double s = init[static_cast<std::size_t>(c)];
      for (const auto& stage : stages) s += learning_rate * stage[static_cast<std::size_t>(c)].predict_value(x.row(r).data());
      raw(r, c) = s;
    }
  }
  return raw;
}

std::vector<int> GradientBoost::predict(const FeatureMatrix& x) const {
  const Eigen::MatrixXd raw = raw_scores(x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<double> row(classes);
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < classes; ++c) row[c] = raw(r, static_cast<Eigen::Index>(c));
    out[static_cast<std::size_t>(r)] = argmax(row);
  }
  return out;
}

nlohmann::json GradientBoost::to_json() const {
  nlohmann::json stages_json = nlohmann::json::array();
  for (const auto& stage : stages) stages_json.push_back(trees_json(stage));
  return {{"classes", classes},
          {"learning_rate", learning_rate},
          {"init", init},
          {"train_deviance", train_deviance},
          {"stages", std::move(stages_json)}};
}

}  // namespace eeg4
