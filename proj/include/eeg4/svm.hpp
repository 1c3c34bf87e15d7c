#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

struct SmoOptions {
  double C = 1.0;
  double tol = 1e-3;                // stopping gap on the maximal violating pair
  std::size_t max_iterations = 0;   // 0 = max(10^7, 100 n)
  bool shrinking = true;
};

struct SmoResult {
  std::vector<double> alphas;
  double bias = 0.0;  // f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  std::size_t iterations = 0;
  bool converged = true;  // false: max_iterations hit, best iterate returned
};

/// C-SVC dual by sequential minimal optimisation with second-order working-set selection.
/// `kernel` must be symmetric; labels are +1/-1.
SmoResult smo_solve(const Eigen::MatrixXd& kernel, std::span<const int> y, const SmoOptions& options);

enum class KernelType { Linear, Rbf };

struct KernelSpec {
  KernelType type = KernelType::Rbf;
  double gamma = 0.0;  // RBF only; 0 = 1 / (d * Var(X_train))
};

/// One pairwise machine of the one-vs-one ensemble.
struct BinaryMachine {
  int positive = 0;  // class index voted for when the decision value is > 0
  int negative = 0;
  std::vector<std::uint32_t> support;  // rows of MulticlassSvm::support_vectors
  std::vector<double> coefficients;    // alpha_i * y_i
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

struct MulticlassSvm {
  KernelSpec kernel;  // gamma resolved
  std::size_t classes = 0;
  FeatureMatrix support_vectors;
  std::vector<BinaryMachine> machines;  // (0,1), (0,2), ..., (K-2,K-1)

  /// n x machines matrix of pairwise decision values.
  Eigen::MatrixXd decision_values(const FeatureMatrix& x) const;
  /// Majority vote; ties go to the lowest class index.
  std::vector<int> predict(const FeatureMatrix& x) const;

  nlohmann::json to_json() const;
};

/// Kernel between rows of a and rows of b.
Eigen::MatrixXd kernel_matrix(const FeatureMatrix& a, const FeatureMatrix& b, const KernelSpec& kernel);

/// "scale" convention: 1 / (d * variance of all entries of x).
double scale_gamma(const FeatureMatrix& x);

/// Trains the K(K-1)/2 pairwise machines; y holds class indices 0..classes-1.
MulticlassSvm fit_multiclass_svm(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                                 KernelSpec kernel, const SmoOptions& options);

}  // namespace eeg4
