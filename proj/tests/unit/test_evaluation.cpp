#include <doctest.h>

#include "eeg4/cleaning.hpp"
#include "eeg4/evaluation.hpp"
#include "eeg4/synth.hpp"
#include "fixtures.hpp"

using namespace eeg4;

namespace {

std::vector<SubjectFolds> small_corpus(int subjects, double separation, std::uint64_t seed) {
  SynthConfig sc;
  sc.subjects = subjects;
  sc.sessions_per_subject = 1;
  sc.separation = separation;
  sc.seed = seed;
  const auto cleaned = clean_corpus(generate_corpus(sc).sessions, CleanConfig{});
  std::vector<SubjectFolds> out;
  for (const auto& s : cleaned.retained) out.push_back(assemble_folds(s, CvConfig{}));
  return out;
}

}  // namespace

TEST_CASE("confusion rows are predictions, columns are truth") {
  FoldSplit split;
  std::mt19937_64 rng(1);
  fixtures::blobs(20, 5, 5, 50.0, rng, split.train_features, split.train_labels);
  // Test rows placed on class 1's blob but labelled 3.
  split.test_features = eeg4::FeatureMatrix::Zero(4, 5);
  split.test_features.col(1).setConstant(50.0);
  split.test_labels = {3, 3, 3, 1};
  ModelSpec spec;
  spec.algorithm = Algorithm::Knn;
  const auto r = evaluate_fold(spec, split, 9, 2, false);
  CHECK_FALSE(r.failed);
  CHECK(r.confusion[1][3] == 3);
  CHECK(r.confusion[1][1] == 1);
  CHECK(r.correct_count == 1);
  CHECK(r.accuracy == 0.25);
  CHECK(r.fit_seconds == 0.0);
  CHECK(r.predict_seconds == 0.0);
}

TEST_CASE("fold missing a task in training fails without throwing") {
  FoldSplit split;
  std::mt19937_64 rng(2);
  fixtures::blobs(10, 4, 3, 5.0, rng, split.train_features, split.train_labels);
  split.test_features = fixtures::random_matrix(3, 3, rng);
  split.test_labels = {0, 1, 4};
  ModelSpec spec;
  spec.algorithm = Algorithm::DecisionTree;
  const auto r = evaluate_fold(spec, split, 1, 1);
  CHECK(r.failed);
  CHECK(r.failure.find("DegenerateTrainingSet") != std::string::npos);
  CHECK(r.test_count == 3);
  CHECK(r.correct_count == 0);
}

TEST_CASE("column normalisation") {
  ConfusionMatrix c{};
  c[0][0] = 3;
  c[1][0] = 1;
  c[4][2] = 5;
  const auto r = normalize_columns(c);
  CHECK(r[0][0] == 0.75);
  CHECK(r[1][0] == 0.25);
  CHECK(r[4][2] == 1.0);
  CHECK(r[0][1] == 0.0);
}

TEST_CASE("aggregation skips failed folds") {
  FoldResult a, b, c;
  a.confusion[0][0] = 2;
  b.confusion[1][0] = 2;
  c.confusion[4][4] = 100;
  c.failed = true;
  const std::vector<FoldResult> folds{a, b, c};
  const auto agg = aggregate_confusion(folds);
  CHECK(agg.counts[0][0] == 2);
  CHECK(agg.counts[4][4] == 0);
  CHECK(agg.normalized[1][0] == 0.5);
}

TEST_CASE("summary means are unweighted over folds and subjects") {
  BenchmarkSummary s;
  s.algorithms = {Algorithm::Lda};
  s.subjects = {1, 2};
  const auto fold = [](int subject, std::size_t index, double acc, double secs) {
    FoldResult r;
    r.subject_id = subject;
    r.algorithm = Algorithm::Lda;
    r.fold_index = index;
    r.accuracy = acc;
    r.test_count = 10;
    r.fit_seconds = secs;
    return r;
  };
  s.folds = {fold(1, 1, 0.5, 1.0), fold(1, 2, 1.0, 1.0), fold(2, 1, 0.3, 4.0)};
  summarize(s);
  REQUIRE(s.per_subject.size() == 2);
  CHECK(s.score(1, Algorithm::Lda)->accuracy == 0.75);
  CHECK(s.score(1, Algorithm::Lda)->runtime_seconds == 2.0);
  CHECK(s.score(Algorithm::Lda)->mean_accuracy == doctest::Approx(0.525));
  CHECK(s.score(Algorithm::Lda)->mean_runtime_seconds == 3.0);
}

TEST_CASE("benchmark is thread-count independent and JSON round-trips") {
  const auto corpus = small_corpus(2, 2.0, 3);
  const std::vector<Algorithm> algos{Algorithm::Lda, Algorithm::Knn, Algorithm::RandomForest};
  BenchmarkOptions options;
  options.hyper.rf_trees = 10;
  options.seed = 17;
  options.timed = false;
  std::size_t callbacks = 0;
  options.on_fold = [&](const FoldResult&) { ++callbacks; };
  const auto one = run_benchmark(corpus, algos, options);
  options.threads = 3;
  const auto three = run_benchmark(corpus, algos, options);
  CHECK(callbacks == 2 * one.folds.size());
  CHECK(to_json(one) == to_json(three));
  CHECK(one.folds.size() == 2 * 3 * 7);
  const auto back = benchmark_from_json(to_json(one));
  CHECK(to_json(back) == to_json(one));
  CHECK(algorithm_csv(back) == algorithm_csv(one));
  CHECK(confusion_csv(back) == confusion_csv(one));
}

TEST_CASE("fold seeds differ across every coordinate") {
  const auto s = fold_seed(1, 2, Algorithm::RandomForest, 3);
  CHECK(s != fold_seed(2, 2, Algorithm::RandomForest, 3));
  CHECK(s != fold_seed(1, 3, Algorithm::RandomForest, 3));
  CHECK(s != fold_seed(1, 2, Algorithm::AdaBoost, 3));
  CHECK(s != fold_seed(1, 2, Algorithm::RandomForest, 4));
  CHECK(s == fold_seed(1, 2, Algorithm::RandomForest, 3));
}

TEST_CASE("timed runs report finite non-negative times") {
  const auto corpus = small_corpus(1, 2.0, 4);
  BenchmarkOptions options;
  const std::vector<Algorithm> algos{Algorithm::Lda};
  const auto s = run_benchmark(corpus, algos, options);
  for (const auto& f : s.folds) {
    CHECK(std::isfinite(f.fit_seconds));
    CHECK(f.fit_seconds >= 0.0);
    CHECK(f.predict_seconds >= 0.0);
  }
}

TEST_CASE("benchmark trains on the selected feature columns") {
  const auto corpus = small_corpus(1, 2.0, 5);
  const std::vector<Algorithm> algos{Algorithm::Lda};
  BenchmarkOptions options;
  options.timed = false;
  const auto all = run_benchmark(corpus, algos, options);
  options.features = {0};
  const auto one = run_benchmark(corpus, algos, options);
  const auto split = materialize(corpus[0].data, corpus[0].data.folds[0], options.features);
  CHECK(split.train_features.cols() == 1);
  CHECK(one.score(Algorithm::Lda)->mean_accuracy < all.score(Algorithm::Lda)->mean_accuracy);
}
