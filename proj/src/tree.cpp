#include "eeg4/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "eeg4/error.hpp"

namespace eeg4 {

TrainingColumns::TrainingColumns(const FeatureMatrix& x)
    : rows_(static_cast<std::size_t>(x.rows())), cols_(static_cast<std::size_t>(x.cols())) {
  values_.resize(rows_ * cols_);
  order_.resize(rows_ * cols_);
  for (std::size_t f = 0; f < cols_; ++f) {
    double* col = values_.data() + f * rows_;
    for (std::size_t i = 0; i < rows_; ++i) col[i] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
    std::uint32_t* ord = order_.data() + f * rows_;
    std::iota(ord, ord + rows_, 0u);
    std::stable_sort(ord, ord + rows_, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
}

std::size_t DecisionTree::leaf_of(const double* x) const {
  std::size_t n = 0;
  while (nodes[n].feature >= 0) {
    const TreeNode& node = nodes[n];
    n = static_cast<std::size_t>(x[node.feature] <= node.threshold ? node.left : node.right);
  }
  return n;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

nlohmann::json DecisionTree::to_json() const {
  std::vector<int> feature, left, right, label;
  std::vector<double> threshold, value;
  for (const auto& n : nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    label.push_back(n.label);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"label", label},         {"value", value}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& doc) {
  const auto feature = doc.at("feature").get<std::vector<int>>();
  const auto threshold = doc.at("threshold").get<std::vector<double>>();
  const auto left = doc.at("left").get<std::vector<int>>();
  const auto right = doc.at("right").get<std::vector<int>>();
  const auto label = doc.at("label").get<std::vector<int>>();
  const auto value = doc.at("value").get<std::vector<double>>();
  DecisionTree t;
  t.nodes.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i)
    t.nodes[i] = {feature[i], threshold[i], left[i], right[i], label[i], value[i]};
  return t;
}

namespace {

// Per-feature row orders restricted to the rows in play, partitioned in place as the tree
// grows so that every node owns the same [begin, end) slice of each feature's order.
class NodeOrders {
 public:
  NodeOrders(const TrainingColumns& x, std::span<const double> weights) : cols_(x.cols()) {
    const std::size_t n = x.rows();
    if (weights.empty()) {
      active_ = n;
      idx_.resize(n * cols_);
      for (std::size_t f = 0; f < cols_; ++f) std::copy_n(x.order(f), n, idx_.data() + f * n);
    } else {
      active_ = static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0; }));
      idx_.resize(active_ * cols_);
      for (std::size_t f = 0; f < cols_; ++f) {
        std::uint32_t* out = idx_.data() + f * active_;
        const std::uint32_t* ord = x.order(f);
        for (std::size_t k = 0; k < n; ++k) {
          if (weights[ord[k]] > 0) *out++ = ord[k];
        }
      }
    }
    tmp_.resize(active_);
  }

  std::size_t active() const { return active_; }
  const std::uint32_t* feature(std::size_t f) const { return idx_.data() + f * active_; }

  // Stable split of [begin, end) of every feature: rows flagged in goes_left first.
  void partition(std::size_t begin, std::size_t end, const std::vector<char>& goes_left) {
    for (std::size_t f = 0; f < cols_; ++f) {
      std::uint32_t* seg = idx_.data() + f * active_;
      std::size_t write = begin, spill = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const std::uint32_t r = seg[k];
        if (goes_left[r]) {
          seg[write++] = r;
        } else {
          tmp_[spill++] = r;
        }
      }
      std::copy_n(tmp_.data(), spill, seg + write);
    }
  }

 private:
  std::size_t cols_;
  std::size_t active_ = 0;
  std::vector<std::uint32_t> idx_;
  std::vector<std::uint32_t> tmp_;
};

struct Pending {
  int node;
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid >= hi ? lo : mid;
}

// Strictly better, with a relative margin so that rounding noise cannot overturn the
// lowest-feature, lowest-threshold preference between equal splits.
bool improves(double score, double best) { return score > best + 1e-12 * std::max(1.0, std::abs(best)); }

bool constant_in(const TrainingColumns& x, const NodeOrders& orders, std::size_t f, std::size_t begin, std::size_t end) {
  const double* col = x.column(f);
  const std::uint32_t* seg = orders.feature(f);
  return col[seg[begin]] == col[seg[end - 1]];
}

// Candidate features for one node, ascending. Draws without replacement until `want`
// non-constant features are found (or the features run out).
std::vector<std::size_t> candidate_features(const TrainingColumns& x, const NodeOrders& orders, std::size_t begin,
                                            std::size_t end, std::size_t want, std::mt19937_64* rng,
                                            std::vector<std::size_t>& perm) {
  const std::size_t d = x.cols();
  std::vector<std::size_t> out;
  if (want == 0 || want >= d || rng == nullptr) {
    for (std::size_t f = 0; f < d; ++f) {
      if (!constant_in(x, orders, f, begin, end)) out.push_back(f);
    }
    return out;
  }
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t t = 0; t < d && out.size() < want; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, d - 1);
    std::swap(perm[t], perm[pick(*rng)]);
    if (!constant_in(x, orders, perm[t], begin, end)) out.push_back(perm[t]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DecisionTree build_cart(const TrainingColumns& x, std::span<const int> y, std::size_t classes,
                        std::span<const double> weights, const TreeParams& params, std::mt19937_64* rng) {
  const std::size_t n = x.rows();
  if (y.size() != n || (!weights.empty() && weights.size() != n))
    throw Error(ErrorCode::DimensionMismatch, "labels/weights do not match the feature rows");
  NodeOrders orders(x, weights);
  if (orders.active() == 0) throw Error(ErrorCode::DegenerateTrainingSet, "no rows with positive weight");
  const auto weight = [&weights](std::uint32_t r) { return weights.empty() ? 1.0 : weights[r]; };

  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<Pending> stack{{0, 0, orders.active(), 0}};
  std::vector<double> total(classes), left(classes), right(classes);
  std::vector<char> goes_left(n, 0);
  std::vector<std::size_t> perm(x.cols());

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();

    std::fill(total.begin(), total.end(), 0.0);
    const std::uint32_t* any = orders.feature(0);
    for (std::size_t k = p.begin; k < p.end; ++k) total[static_cast<std::size_t>(y[any[k]])] += weight(any[k]);
    int majority = 0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (total[c] > total[static_cast<std::size_t>(majority)]) majority = static_cast<int>(c);
      if (total[c] > 0) ++present;
    }
    tree.nodes[static_cast<std::size_t>(p.node)].label = majority;

    const std::size_t m = p.end - p.begin;
    if (present <= 1 || m < params.min_split || (params.max_depth > 0 && p.depth >= params.max_depth)) continue;

    double wtot = 0.0, sum_sq_tot = 0.0;
    for (double t : total) {
      wtot += t;
      sum_sq_tot += t * t;
    }
    SplitChoice best;
    best.score = -1.0;
    for (std::size_t f : candidate_features(x, orders, p.begin, p.end, params.features_per_split, rng, perm)) {
      const double* col = x.column(f);
      const std::uint32_t* seg = orders.feature(f);
      std::fill(left.begin(), left.end(), 0.0);
      std::copy(total.begin(), total.end(), right.begin());
      double wl = 0.0, wr = wtot, sl = 0.0, sr = sum_sq_tot;
      for (std::size_t k = p.begin; k + 1 < p.end; ++k) {
        const std::uint32_t r = seg[k];
        const auto c = static_cast<std::size_t>(y[r]);
        const double w = weight(r);
        sl += w * (2.0 * left[c] + w);
        sr += w * (w - 2.0 * right[c]);
        left[c] += w;
        right[c] -= w;
        wl += w;
        wr -= w;
        const double v = col[r], next = col[seg[k + 1]];
        if (!(v < next)) continue;
        // Maximising sum_c L_c^2/W_L + sum_c R_c^2/W_R minimises the weighted child Gini.
        const double score = sl / wl + sr / wr;
        if (best.feature < 0 || improves(score, best.score)) {
          best = {static_cast<int>(f), midpoint(v, next), score};
        }
      }
    }
    if (best.feature < 0) continue;

    const double* col = x.column(static_cast<std::size_t>(best.feature));
    const std::uint32_t* seg = orders.feature(0);
    std::size_t n_left = 0;
    for (std::size_t k = p.begin; k < p.end; ++k) {
      const bool l = col[seg[k]] <= best.threshold;
      goes_left[seg[k]] = l;
      n_left += l;
    }
    orders.partition(p.begin, p.end, goes_left);

    const int left_id = static_cast<int>(tree.nodes.size());
    TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = left_id + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    stack.push_back({left_id + 1, p.begin + n_left, p.end, p.depth + 1});
    stack.push_back({left_id, p.begin, p.begin + n_left, p.depth + 1});
  }
  return tree;
}

namespace {

struct RegressionSplit {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
  double left_sum = 0.0;
  std::size_t left_count = 0;
};

}  // namespace

DecisionTree build_regression_tree(const TrainingColumns& x, std::span<const double> target,
                                   const TreeParams& params) {
  const std::size_t n = x.rows();
  if (target.size() != n) throw Error(ErrorCode::DimensionMismatch, "target does not match the feature rows");
  NodeOrders orders(x, {});
  DecisionTree tree;
  tree.nodes.emplace_back();
  double root_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) root_sum += target[orders.feature(0)[k]];
  tree.nodes[0].value = root_sum / static_cast<double>(n);
  std::vector<Pending> stack{{0, 0, n, 0}};
  std::vector<char> goes_left(n, 0);

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const std::size_t m = p.end - p.begin;
    if (m < params.min_split || (params.max_depth > 0 && p.depth >= params.max_depth)) continue;
    const std::uint32_t* any = orders.feature(0);
    double sum = 0.0, lo = target[any[p.begin]], hi = lo;
    for (std::size_t k = p.begin; k < p.end; ++k) {
      const double t = target[any[k]];
      sum += t;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    if (lo == hi) continue;

    RegressionSplit best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
      const double* col = x.column(f);
      const std::uint32_t* seg = orders.feature(f);
      if (col[seg[p.begin]] == col[seg[p.end - 1]]) continue;
      double sl = 0.0;
      for (std::size_t k = p.begin; k + 1 < p.end; ++k) {
        sl += target[seg[k]];
        const double v = col[seg[k]], next = col[seg[k + 1]];
        if (!(v < next)) continue;
        const double nl = static_cast<double>(k + 1 - p.begin);
        const double nr = static_cast<double>(m) - nl;
        const double sr = sum - sl;
        const double score = sl * sl / nl + sr * sr / nr;
        if (best.feature < 0 || improves(score, best.score))
          best = {static_cast<int>(f), midpoint(v, next), score, sl, k + 1 - p.begin};
      }
    }
    if (best.feature < 0) continue;

    const int left_id = static_cast<int>(tree.nodes.size());
    TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = left_id + 1;
    const std::size_t n_left = best.left_count;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(left_id)].value = best.left_sum / static_cast<double>(n_left);
    tree.nodes[static_cast<std::size_t>(left_id) + 1].value =
        (sum - best.left_sum) / static_cast<double>(m - n_left);
    // Children at the depth limit are leaves; their rows never need regrouping.
    if (params.max_depth > 0 && p.depth + 1 >= params.max_depth) continue;

    const std::uint32_t* seg = orders.feature(static_cast<std::size_t>(best.feature));
    for (std::size_t k = p.begin; k < p.end; ++k) goes_left[seg[k]] = k - p.begin < n_left;
    orders.partition(p.begin, p.end, goes_left);
    stack.push_back({left_id + 1, p.begin + n_left, p.end, p.depth + 1});
    stack.push_back({left_id, p.begin, p.begin + n_left, p.depth + 1});
  }
  return tree;
}

}  // namespace eeg4
