#include "eeg4/svm.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <json.hpp>

#include "eeg4/error.hpp"
#include "smo_solver.hpp"

namespace eeg4 {

SmoResult smo_solve(const Eigen::MatrixXd& kernel, std::span<const int> y, const SmoOptions& options) {
  const auto n = static_cast<std::size_t>(kernel.rows());
  if (kernel.cols() != kernel.rows() || y.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "kernel must be square and match the label count");
  if (!(options.C > 0.0)) throw Error(ErrorCode::InvalidConfig, "C must be positive");
  std::vector<std::uint32_t> global(n);
  std::iota(global.begin(), global.end(), 0u);
  // Column-major storage of a symmetric matrix doubles as row access.
  detail::GramRows<double> gram{kernel.data(), n};
  detail::SmoSolver<double> solver(gram, global, y, options);
  return solver.solve();
}

double scale_gamma(const FeatureMatrix& x) {
  const double count = static_cast<double>(x.size());
  if (count == 0) return 1.0;
  const double mean = x.sum() / count;
  const double var = (x.array() - mean).square().sum() / count;
  const double d = static_cast<double>(x.cols());
  return var > 0.0 ? 1.0 / (d * var) : 1.0;
}

Eigen::MatrixXd kernel_matrix(const FeatureMatrix& a, const FeatureMatrix& b, const KernelSpec& kernel) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "kernel operands differ in width");
  Eigen::MatrixXd k = a * b.transpose();
  if (kernel.type == KernelType::Linear) return k;
  const Eigen::VectorXd na = a.rowwise().squaredNorm();
  const Eigen::RowVectorXd nb = b.rowwise().squaredNorm().transpose();
  k = ((-2.0 * k).colwise() + na).rowwise() + nb;
  return (-kernel.gamma * k.array().max(0.0)).exp().matrix();
}

namespace {

using FloatRows = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Single-precision Gram over the rows of one class pair; the solver only needs it to
// rank working sets and update gradients, the stored model is evaluated in double.
void pair_gram(const FeatureMatrix& x, const std::vector<std::uint32_t>& rows, const KernelSpec& kernel,
               FloatRows& sub, std::vector<float>& buffer) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  sub.resize(n, x.cols());
  for (Eigen::Index i = 0; i < n; ++i) sub.row(i) = x.row(rows[static_cast<std::size_t>(i)]).cast<float>();
  if (buffer.size() < rows.size() * rows.size()) buffer.resize(rows.size() * rows.size());
  Eigen::Map<FloatRows> gram(buffer.data(), n, n);
  gram.noalias() = sub * sub.transpose();
  if (kernel.type == KernelType::Linear) return;
  const Eigen::VectorXf norms = gram.diagonal();
  const auto g = static_cast<float>(kernel.gamma);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = gram.row(i).array();
    row = (-g * ((norms.transpose().array() - 2.0f * row) + norms(i)).max(0.0f)).exp();
    gram(i, i) = 1.0f;
  }
}

// Approximate start for the linear machine: dual coordinate descent on the bias-augmented
// problem, rescaled so that y'a = 0, with gradients recovered from the primal vectors.
struct WarmStart {
  std::vector<double> alpha, yg, ygbar;
};

WarmStart linear_warm_start(const FeatureMatrix& x, const std::vector<std::uint32_t>& rows,
                            const std::vector<int>& signs, double C) {
  constexpr int kEpochs = 100;
  const std::size_t n = rows.size();
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd xa(d + 1, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    xa.col(static_cast<Eigen::Index>(i)).head(d) = x.row(rows[i]).transpose();
    xa(d, static_cast<Eigen::Index>(i)) = 1.0;
  }
  const Eigen::VectorXd qd = xa.colwise().squaredNorm().transpose();
  WarmStart out;
  out.alpha.assign(n, 0.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937_64 rng(0x5eed);
  for (int epoch = 0; epoch < kEpochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (const std::uint32_t i : perm) {
      const auto col = xa.col(i);
      const double yi = signs[i];
      const double grad = yi * col.dot(w) - 1.0;
      const double next = std::clamp(out.alpha[i] - grad / qd(i), 0.0, C);
      if (next == out.alpha[i]) continue;
      w += (next - out.alpha[i]) * yi * col;
      out.alpha[i] = next;
    }
  }
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) (signs[i] > 0 ? pos : neg) += out.alpha[i];
  for (std::size_t i = 0; i < n; ++i) {
    if (signs[i] > 0 && pos > neg) out.alpha[i] *= neg / pos;
    if (signs[i] < 0 && neg > pos) out.alpha[i] *= pos / neg;
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(d), u = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = xa.col(static_cast<Eigen::Index>(i)).head(d);
    v += out.alpha[i] * signs[i] * col;
    if (out.alpha[i] >= C) u += static_cast<double>(signs[i]) * col;
  }
  out.yg.resize(n);
  out.ygbar.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = xa.col(static_cast<Eigen::Index>(i)).head(d);
    out.yg[i] = col.dot(v) - signs[i];
    out.ygbar[i] = C * col.dot(u);
  }
  return out;
}

}  // namespace

MulticlassSvm fit_multiclass_svm(const FeatureMatrix& x, std::span<const int> y, std::size_t classes,
                                 KernelSpec kernel, const SmoOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (classes < 2) throw Error(ErrorCode::DegenerateTrainingSet, "SVM needs at least two classes");
  if (!(options.C > 0.0)) throw Error(ErrorCode::InvalidConfig, "C must be positive");
  if (kernel.type == KernelType::Rbf && !(kernel.gamma > 0.0)) kernel.gamma = scale_gamma(x);

  std::vector<std::vector<std::uint32_t>> members(classes);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= classes)
      throw Error(ErrorCode::Internal, "class index out of range");
    members[static_cast<std::size_t>(y[i])].push_back(static_cast<std::uint32_t>(i));
  }

  MulticlassSvm model;
  model.kernel = kernel;
  model.classes = classes;
  std::vector<std::int64_t> sv_slot(y.size(), -1);
  std::vector<std::uint32_t> sv_rows;
  FloatRows sub;
  std::vector<float> gram;

  for (std::size_t a = 0; a < classes; ++a) {
    for (std::size_t b = a + 1; b < classes; ++b) {
      BinaryMachine machine;
      machine.positive = static_cast<int>(a);
      machine.negative = static_cast<int>(b);
      std::vector<std::uint32_t> rows;
      rows.reserve(members[a].size() + members[b].size());
      std::merge(members[a].begin(), members[a].end(), members[b].begin(), members[b].end(),
                 std::back_inserter(rows));
      if (members[a].empty() || members[b].empty()) {
        // Degenerate pair: constant vote for whichever side has data.
        machine.bias = members[a].empty() ? -1.0 : 1.0;
        model.machines.push_back(std::move(machine));
        continue;
      }
      std::vector<int> signs(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) signs[i] = y[rows[i]] == static_cast<int>(a) ? 1 : -1;

      pair_gram(x, rows, kernel, sub, gram);
      std::vector<std::uint32_t> global(rows.size());
      std::iota(global.begin(), global.end(), 0u);
      detail::SmoSolver<float> solver({gram.data(), rows.size()}, global, signs, options);
      if (kernel.type == KernelType::Linear) {
        const WarmStart start = linear_warm_start(x, rows, signs, options.C);
        solver.warm_start(start.alpha, start.yg, start.ygbar);
      }
      const SmoResult res = solver.solve();

      machine.bias = res.bias;
      machine.iterations = res.iterations;
      machine.converged = res.converged;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (res.alphas[i] <= 0.0) continue;
        const std::uint32_t row = rows[i];
        if (sv_slot[row] < 0) {
          sv_slot[row] = static_cast<std::int64_t>(sv_rows.size());
          sv_rows.push_back(row);
        }
        machine.support.push_back(static_cast<std::uint32_t>(sv_slot[row]));
        machine.coefficients.push_back(res.alphas[i] * signs[i]);
      }
      model.machines.push_back(std::move(machine));
    }
  }

  model.support_vectors.resize(static_cast<Eigen::Index>(sv_rows.size()), x.cols());
  for (std::size_t i = 0; i < sv_rows.size(); ++i)
    model.support_vectors.row(static_cast<Eigen::Index>(i)) = x.row(sv_rows[i]);
  return model;
}

Eigen::MatrixXd MulticlassSvm::decision_values(const FeatureMatrix& x) const {
  if (support_vectors.rows() > 0 && x.cols() != support_vectors.cols())
    throw Error(ErrorCode::DimensionMismatch, "SVM input width differs from training width");
  const Eigen::MatrixXd k = support_vectors.rows() > 0 ? kernel_matrix(x, support_vectors, kernel)
                                                       : Eigen::MatrixXd(x.rows(), 0);
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(machines.size()));
  for (std::size_t m = 0; m < machines.size(); ++m) {
    const auto& machine = machines[m];
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(k.cols());
    for (std::size_t s = 0; s < machine.support.size(); ++s) coef(machine.support[s]) += machine.coefficients[s];
    out.col(static_cast<Eigen::Index>(m)) = (k * coef).array() + machine.bias;
  }
  return out;
}

std::vector<int> MulticlassSvm::predict(const FeatureMatrix& x) const {
  const Eigen::MatrixXd dec = decision_values(x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<int> votes(classes);
  for (Eigen::Index r = 0; r < dec.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t m = 0; m < machines.size(); ++m) {
      const auto& machine = machines[m];
      ++votes[static_cast<std::size_t>(dec(r, static_cast<Eigen::Index>(m)) > 0 ? machine.positive : machine.negative)];
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

nlohmann::json MulticlassSvm::to_json() const {
  nlohmann::json machines_json = nlohmann::json::array();
  for (const auto& m : machines) {
    machines_json.push_back({{"positive", m.positive},
                             {"negative", m.negative},
                             {"support", m.support},
                             {"coefficients", m.coefficients},
                             {"bias", m.bias},
                             {"iterations", m.iterations},
                             {"converged", m.converged}});
  }
  nlohmann::json sv = nlohmann::json::array();
  for (Eigen::Index r = 0; r < support_vectors.rows(); ++r) {
    std::vector<double> row(support_vectors.row(r).begin(), support_vectors.row(r).end());
    sv.push_back(std::move(row));
  }
  return {{"kernel", kernel.type == KernelType::Linear ? "linear" : "rbf"},
          {"gamma", kernel.gamma},
          {"classes", classes},
          {"support_vectors", std::move(sv)},
          {"machines", std::move(machines_json)}};
}

}  // namespace eeg4
