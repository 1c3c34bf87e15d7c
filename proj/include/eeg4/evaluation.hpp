#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eeg4/crossval.hpp"
#include "eeg4/learners.hpp"
#include "eeg4/types.hpp"

namespace eeg4 {

/// counts[predicted][actual]
using ConfusionMatrix = std::array<std::array<std::size_t, kTaskCount>, kTaskCount>;
using RateMatrix = std::array<std::array<double, kTaskCount>, kTaskCount>;

struct FoldResult {
  int subject_id = 0;
  Algorithm algorithm = Algorithm::RandomForest;
  std::size_t fold_index = 0;  // 1-based
  std::size_t test_count = 0;
  std::size_t correct_count = 0;
  double accuracy = 0.0;
  ConfusionMatrix confusion{};
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  bool failed = false;
  std::string failure;  // error text of a failed fold
};

/// Fits on the train rows and scores the test rows. Labels must be task labels 0..4; every task
/// has to occur in the training rows. Fit errors are returned as a failed FoldResult.
/// With `timed` false the clock is not read and both timings stay 0.
FoldResult evaluate_fold(const ModelSpec& spec, const FoldSplit& split, int subject_id, std::size_t fold_index,
                         bool timed = true);

struct AggregatedConfusion {
  ConfusionMatrix counts{};
  RateMatrix normalized{};  // each actual-task column divided by its sum; empty columns stay 0
};

/// Sums the confusion matrices of the non-failed folds.
AggregatedConfusion aggregate_confusion(std::span<const FoldResult> folds);
RateMatrix normalize_columns(const ConfusionMatrix& counts);

struct SubjectScore {
  int subject_id = 0;
  Algorithm algorithm = Algorithm::RandomForest;
  double accuracy = 0.0;         // unweighted mean over the folds that ran
  double runtime_seconds = 0.0;  // summed fit + predict seconds over those folds
  std::size_t folds_used = 0;
  std::size_t folds_failed = 0;
  AggregatedConfusion confusion;
};

struct AlgorithmScore {
  Algorithm algorithm = Algorithm::RandomForest;
  double mean_accuracy = 0.0;  // unweighted mean over subjects
  double mean_runtime_seconds = 0.0;
  std::size_t subjects = 0;
};

struct BenchmarkSummary {
  std::vector<Algorithm> algorithms;
  std::vector<int> subjects;
  std::vector<FoldResult> folds;        // subject, algorithm, fold order
  std::vector<SubjectScore> per_subject;  // subject-major; only pairs with at least one usable fold
  std::vector<AlgorithmScore> per_algorithm;  // in `algorithms` order; only algorithms with a usable subject
  std::vector<std::string> log;

  const SubjectScore* score(int subject_id, Algorithm algorithm) const;
  const AlgorithmScore* score(Algorithm algorithm) const;
};

struct BenchmarkOptions {
  Hyperparameters hyper;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // 0 = one per hardware thread
  bool timed = true;
  std::vector<std::size_t> features;  // feature columns to train on; empty = all 20
  std::function<void(const FoldResult&)> on_fold;  // called from the aggregating thread, in order
};

/// Seed of one (subject, algorithm, fold) evaluation.
std::uint64_t fold_seed(std::uint64_t base, int subject_id, Algorithm algorithm, std::size_t fold_index);

/// Every retained fold of every subject for every algorithm. Results do not depend on `threads`.
BenchmarkSummary run_benchmark(std::span<const SubjectFolds> subjects, std::span<const Algorithm> algorithms,
                               const BenchmarkOptions& options);

/// Recomputes per_subject and per_algorithm from `folds`.
void summarize(BenchmarkSummary& summary);

nlohmann::json to_json(const BenchmarkSummary& summary);
BenchmarkSummary benchmark_from_json(const nlohmann::json& doc);

/// algorithm,mean_accuracy,mean_runtime_s
std::string algorithm_csv(const BenchmarkSummary& summary);
/// subject,algorithm,accuracy
std::string subject_csv(const BenchmarkSummary& summary);
/// subject,algorithm,predicted,actual,count,rate
std::string confusion_csv(const BenchmarkSummary& summary);

}  // namespace eeg4
