#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

enum class LdaShrinkage { None, LedoitWolf };

struct LdaModel {
  Eigen::MatrixXd means;      // classes x d
  Eigen::MatrixXd coef;       // classes x d, row c = inv(Sigma) mu_c
  Eigen::VectorXd intercept;  // -mu_c' inv(Sigma) mu_c / 2 + log prior_c
  std::vector<double> priors;
  double shrinkage = 0.0;

  /// n x classes discriminant scores.
  Eigen::MatrixXd decision_function(const FeatureMatrix& x) const;
  /// Highest score; ties go to the lowest class index.
  std::vector<int> predict(const FeatureMatrix& x) const;
  nlohmann::json to_json() const;
};

/// Ledoit-Wolf shrinkage intensity for already-centred data, clipped to [0, 1].
double ledoit_wolf_shrinkage(const Eigen::MatrixXd& centered);

/// Gaussian classifier with one covariance pooled over classes (weighted by prior).
/// Without shrinkage a covariance whose smallest eigenvalue is at most 1e-10 of the
/// largest raises SingularCovariance.
LdaModel fit_lda(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, LdaShrinkage shrinkage);

}  // namespace eeg4
