#include "eeg4/lda.hpp"

#include <algorithm>
#include <cmath>

#include "eeg4/error.hpp"

namespace eeg4 {

double ledoit_wolf_shrinkage(const Eigen::MatrixXd& centered) {
  const auto n = static_cast<double>(centered.rows());
  const auto p = static_cast<double>(centered.cols());
  if (centered.rows() == 0 || centered.cols() == 0) return 0.0;
  const Eigen::MatrixXd x2 = centered.array().square().matrix();
  const double trace = x2.sum() / n;
  const double mu = trace / p;
  const double beta_sum = (x2.transpose() * x2).sum();
  const double delta_sum = (centered.transpose() * centered).array().square().sum() / (n * n);
  double beta = (beta_sum / n - delta_sum) / (p * n);
  double delta = (delta_sum - 2.0 * mu * trace + p * mu * mu) / p;
  beta = std::min(beta, delta);
  if (beta <= 0.0 || delta <= 0.0) return 0.0;
  return std::clamp(beta / delta, 0.0, 1.0);
}

LdaModel fit_lda(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, LdaShrinkage shrinkage) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = x.cols();
  if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (classes < 2 || n < 2) throw Error(ErrorCode::DegenerateTrainingSet, "LDA needs two classes and two rows");

  LdaModel model;
  model.means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(classes), d);
  std::vector<double> counts(classes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(y[i]);
    model.means.row(c) += x.row(static_cast<Eigen::Index>(i));
    counts[static_cast<std::size_t>(c)] += 1.0;
  }
  model.priors.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0.0) throw Error(ErrorCode::DegenerateTrainingSet, "class without training rows");
    model.means.row(static_cast<Eigen::Index>(c)) /= counts[c];
    model.priors[c] = counts[c] / static_cast<double>(n);
  }

  // With class-frequency priors, sum_c prior_c S_c is the covariance of the class-centred rows.
  Eigen::MatrixXd centered(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i)
    centered.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(i)) - model.means.row(y[i]);
  Eigen::MatrixXd sigma = (centered.transpose() * centered) / static_cast<double>(n);

  if (shrinkage == LdaShrinkage::LedoitWolf) {
    model.shrinkage = ledoit_wolf_shrinkage(centered);
    const double target = sigma.trace() / static_cast<double>(d);
    sigma *= 1.0 - model.shrinkage;
    sigma.diagonal().array() += model.shrinkage * target;
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const Eigen::VectorXd values = eig.eigenvalues();
  const double top = values.maxCoeff();
  if (!(top > 0.0) || values.minCoeff() <= 1e-10 * top)
    throw Error(ErrorCode::SingularCovariance, "pooled covariance is singular; use shrinkage");
  const Eigen::MatrixXd inverse =
      eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  model.coef = model.means * inverse;
  model.intercept.resize(static_cast<Eigen::Index>(classes));
  for (std::size_t c = 0; c < classes; ++c) {
    const auto r = static_cast<Eigen::Index>(c);
    model.intercept(r) = -0.5 * model.coef.row(r).dot(model.means.row(r)) + std::log(model.priors[c]);
  }
  return model;
}

Eigen::MatrixXd LdaModel::decision_function(const FeatureMatrix& x) const {
  if (x.cols() != coef.cols()) throw Error(ErrorCode::DimensionMismatch, "LDA input width differs from training width");
  Eigen::MatrixXd scores = x * coef.transpose();
  scores.rowwise() += intercept.transpose();
  return scores;
}

std::vector<int> LdaModel::predict(const FeatureMatrix& x) const {
  const Eigen::MatrixXd scores = decision_function(x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(r, c) > scores(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

namespace {

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace

nlohmann::json LdaModel::to_json() const {
  return {{"means", rows_of(means)},
          {"coef", rows_of(coef)},
          {"intercept", std::vector<double>(intercept.begin(), intercept.end())},
          {"priors", priors},
          {"shrinkage", shrinkage}};
}

}  // namespace eeg4
