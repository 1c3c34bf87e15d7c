#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eeg4/types.hpp"

namespace oracle {

// Exhaustive scan: rank every training row by squared distance (row index breaks ties), vote
// among the first k, tied votes to the smaller mean distance, then to the lower class.
inline std::vector<int> knn_predict(const eeg4::FeatureMatrix& train, std::span<const int> labels, std::size_t classes,
                                    std::size_t k, const eeg4::FeatureMatrix& query) {
  std::vector<int> out;
  for (Eigen::Index q = 0; q < query.rows(); ++q) {
    std::vector<std::pair<double, std::size_t>> all;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      double s = 0.0;
      for (Eigen::Index f = 0; f < train.cols(); ++f) {
        const double diff = query(q, f) - train(i, f);
        s += diff * diff;
      }
      all.emplace_back(s, static_cast<std::size_t>(i));
    }
    std::sort(all.begin(), all.end());
    std::vector<int> votes(classes, 0);
    std::vector<double> dist(classes, 0.0);
    for (std::size_t j = 0; j < std::min(k, all.size()); ++j) {
      const auto c = static_cast<std::size_t>(labels[all[j].second]);
      ++votes[c];
      dist[c] += std::sqrt(all[j].first);
    }
    int best = -1;
    for (std::size_t c = 0; c < classes; ++c) {
      if (votes[c] == 0) continue;
      if (best < 0) {
        best = static_cast<int>(c);
        continue;
      }
      const auto b = static_cast<std::size_t>(best);
      const double mc = dist[c] / votes[c], mb = dist[b] / votes[b];
      if (votes[c] > votes[b] || (votes[c] == votes[b] && mc < mb)) best = static_cast<int>(c);
    }
    out.push_back(best);
  }
  return out;
}

struct KktReport {
  double worst_violation = 0.0;  // largest breach of the margin conditions, in units of y f(x)
  double equality_residual = 0.0;
  bool box_ok = true;
};

// Checks a C-SVC dual solution against its KKT conditions:
// a = 0 -> y f >= 1, 0 < a < C -> y f = 1, a = C -> y f <= 1.
inline KktReport kkt(const Eigen::MatrixXd& kernel, std::span<const int> y, std::span<const double> alpha, double bias,
                     double C) {
  KktReport r;
  const auto n = static_cast<Eigen::Index>(y.size());
  double eq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = alpha[static_cast<std::size_t>(i)];
    if (a < 0.0 || a > C) r.box_ok = false;
    eq += a * y[static_cast<std::size_t>(i)];
    double f = bias;
    for (Eigen::Index j = 0; j < n; ++j) f += alpha[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)] * kernel(i, j);
    const double margin = y[static_cast<std::size_t>(i)] * f;
    const double eps = 1e-12 * C;
    double v = 0.0;
    if (a <= eps) {
      v = std::max(0.0, 1.0 - margin);
    } else if (a >= C - eps) {
      v = std::max(0.0, margin - 1.0);
    } else {
      v = std::abs(margin - 1.0);
    }
    r.worst_violation = std::max(r.worst_violation, v);
  }
  r.equality_residual = std::abs(eq);
  return r;
}

// Two-class Gaussian discriminant with a shared covariance and equal priors: the boundary is
// w'x + c = 0 with w = S^-1 (m1 - m0) and c = -w'(m0 + m1) / 2. Returned normalised to |w| = 1.
inline std::pair<Eigen::VectorXd, double> lda_boundary(const eeg4::FeatureMatrix& x, std::span<const int> y) {
  const Eigen::Index d = x.cols();
  Eigen::VectorXd m[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  double n[2] = {0, 0};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y[static_cast<std::size_t>(i)];
    m[c] += x.row(i).transpose();
    n[c] += 1;
  }
  m[0] /= n[0];
  m[1] /= n[1];
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd r = x.row(i).transpose() - m[y[static_cast<std::size_t>(i)]];
    s += r * r.transpose();
  }
  s /= (n[0] + n[1] - 2.0);
  const Eigen::VectorXd w = s.fullPivLu().solve(m[1] - m[0]);
  const double c = -0.5 * w.dot(m[0] + m[1]);
  const double norm = w.norm();
  return {w / norm, c / norm};
}

struct RootSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();  // weighted child Gini
};

// Tries every feature and every midpoint between consecutive distinct values; keeps the first
// strictly better candidate so ties go to the lower feature, then the lower threshold.
inline RootSplit best_gini_split(const eeg4::FeatureMatrix& x, std::span<const int> y, std::size_t classes) {
  RootSplit best;
  const auto n = static_cast<double>(y.size());
  const auto gini = [&](const std::vector<double>& counts, double total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (double c : counts) g -= (c / total) * (c / total);
    return g;
  };
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> values;
    for (Eigen::Index i = 0; i < x.rows(); ++i) values.push_back(x(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double t = values[v] + (values[v + 1] - values[v]) / 2.0;
      std::vector<double> left(classes, 0), right(classes, 0);
      double nl = 0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (x(i, f) <= t) {
          ++left[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
          ++nl;
        } else {
          ++right[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
        }
      }
      const double score = (nl * gini(left, nl) + (n - nl) * gini(right, n - nl)) / n;
      if (score < best.impurity - 1e-12) best = {static_cast<int>(f), t, score};
    }
  }
  return best;
}

}  // namespace oracle
