#include <doctest.h>

#include <algorithm>
#include <random>

#include "../oracles/svg_check.hpp"
#include "eeg4/error.hpp"
#include "eeg4/report.hpp"

using namespace eeg4;

namespace {

BenchmarkSummary summary_of(const std::vector<std::pair<Algorithm, std::pair<double, double>>>& scores) {
  BenchmarkSummary s;
  for (const auto& [a, v] : scores) {
    s.algorithms.push_back(a);
    AlgorithmScore score;
    score.algorithm = a;
    score.mean_accuracy = v.first;
    score.mean_runtime_seconds = v.second;
    score.subjects = 1;
    s.per_algorithm.push_back(score);
  }
  return s;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Internal;
}

// Subject-level summary with per-subject accuracies for RF and LDA.
BenchmarkSummary two_algorithm_summary() {
  BenchmarkSummary s;
  s.algorithms = {Algorithm::Lda, Algorithm::RandomForest};
  s.subjects = {1, 2, 3};
  const double rf[] = {0.7, 0.4, 0.55};
  const double lda[] = {0.5, 0.45, 0.35};
  for (int subj = 1; subj <= 3; ++subj) {
    for (auto a : s.algorithms) {
      FoldResult f;
      f.subject_id = subj;
      f.algorithm = a;
      f.fold_index = 1;
      f.test_count = 20;
      f.accuracy = a == Algorithm::RandomForest ? rf[subj - 1] : lda[subj - 1];
      f.confusion[0][0] = 10;
      f.confusion[1][0] = 10;
      s.folds.push_back(f);
    }
  }
  summarize(s);
  return s;
}

}  // namespace

TEST_CASE("table order is accuracy descending, then faster, then enum order") {
  const std::vector<std::pair<Algorithm, std::pair<double, double>>> scores{
      {Algorithm::Lda, {0.48, 1.0}},          {Algorithm::RandomForest, {0.63, 37.1}},
      {Algorithm::RbfSvm, {0.61, 5.0}},       {Algorithm::Knn, {0.55, 2.0}},
      {Algorithm::AdaBoost, {0.55, 1.5}},     {Algorithm::DecisionTree, {0.55, 1.5}},
      {Algorithm::GradientBoost, {0.40, 9.0}}};
  const std::vector<Algorithm> expected{Algorithm::RandomForest, Algorithm::RbfSvm,   Algorithm::DecisionTree,
                                        Algorithm::AdaBoost,     Algorithm::Knn,      Algorithm::Lda,
                                        Algorithm::GradientBoost};
  std::mt19937_64 rng(3);
  auto shuffled = scores;
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto rows = table_order(summary_of(shuffled));
    std::vector<Algorithm> got;
    for (const auto& r : rows) got.push_back(r.algorithm);
    CHECK(got == expected);
  }
}

TEST_CASE("table 3 text and csv") {
  const auto s = summary_of({{Algorithm::Lda, {0.48, 1.25}}, {Algorithm::RandomForest, {0.634, 37.1}}});
  CHECK(render_table3_text(s) ==
        "Algorithm      Accuracy  Run-time (s)\n"
        "-------------  --------  ------------\n"
        "Random Forest      0.63         37.10\n"
        "LDA                0.48          1.25\n");
  CHECK(render_table3_csv(s) ==
        "algorithm,mean_accuracy,mean_runtime_s\n"
        "Random Forest,0.634,37.1\n"
        "LDA,0.48,1.25\n");
}

TEST_CASE("table 4 with baselines") {
  const auto s = summary_of({{Algorithm::Lda, {0.5, 1.0}}, {Algorithm::RandomForest, {0.6, 2.0}}});
  const auto baseline = parse_baseline(R"({"RF": 0.63, "lda": 0.48})");
  CHECK(baseline.at(Algorithm::RandomForest) == 0.63);
  CHECK(render_table4_csv(s, baseline) ==
        "algorithm,accuracy,baseline_accuracy\n"
        "Random Forest,0.6,0.63\n"
        "LDA,0.5,0.48\n");
  CHECK(render_table4_csv(s, {}) ==
        "algorithm,accuracy,baseline_accuracy\n"
        "Random Forest,0.6,\n"
        "LDA,0.5,\n");
  CHECK(code_of([] { parse_baseline(R"({"perceptron": 0.1})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_baseline("[1,2]"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("heatmap rejects bad matrices") {
  const std::vector<std::string> labels{"Think", "Count", "Recall", "Breathe", "Draw"};
  std::vector<std::vector<double>> m(5, std::vector<double>(5, 0.2));
  CHECK(oracle::svg_problem(render_heatmap(m, labels, "ok")).empty());
  auto bad = m;
  bad.pop_back();
  CHECK(code_of([&] { render_heatmap(bad, labels, "x"); }) == ErrorCode::DimensionMismatch);
  bad = m;
  bad[2][3] = 1.2;
  CHECK(code_of([&] { render_heatmap(bad, labels, "x"); }) == ErrorCode::AccountingMismatch);
  bad[2][3] = -0.1;
  CHECK(code_of([&] { render_heatmap(bad, labels, "x"); }) == ErrorCode::AccountingMismatch);
}

TEST_CASE("heatmap annotates every cell and escapes text") {
  RateMatrix r{};
  for (std::size_t i = 0; i < 5; ++i) r[i][i] = 1.0;
  const auto svg = render_heatmap(r, "Subject <1> & \"LDA\"");
  CHECK(oracle::svg_problem(svg).empty());
  CHECK(svg.find("Subject &lt;1&gt; &amp; &quot;LDA&quot;") != std::string::npos);
  std::size_t ones = 0, zeros = 0;
  for (std::size_t p = 0; (p = svg.find(">1.00<", p)) != std::string::npos; ++p) ++ones;
  for (std::size_t p = 0; (p = svg.find(">0.00<", p)) != std::string::npos; ++p) ++zeros;
  CHECK(ones == 5);
  CHECK(zeros == 20);
  CHECK(svg.find("Predicted task") != std::string::npos);
  CHECK(svg.find("Actual task") != std::string::npos);
}

TEST_CASE("subject order follows Random Forest accuracy") {
  const std::vector<int> subjects{4, 1, 7, 2, 9};
  const std::vector<std::optional<double>> rf{0.6, std::nullopt, 0.4, 0.6, 0.1};
  CHECK(subject_order(subjects, rf) == std::vector<std::size_t>{4, 2, 3, 0, 1});
}

TEST_CASE("subject comparison chart") {
  const auto s = two_algorithm_summary();
  const auto data = subject_accuracies(s);
  REQUIRE(data.accuracy.size() == 2);
  CHECK(data.accuracy[1][1] == 0.4);
  const auto svg = render_subject_comparison(data);
  CHECK(oracle::svg_problem(svg).empty());
  CHECK(svg.find("Random Forest (0.55)") != std::string::npos);
  CHECK(svg.find("LDA (0.43)") != std::string::npos);
  // X axis in RF order: subject 2 (0.40), 3 (0.55), 1 (0.70).
  const auto p2 = svg.find(">2</text>"), p3 = svg.find(">3</text>"), p1 = svg.find(">1</text>");
  REQUIRE(p2 != std::string::npos);
  CHECK(p2 < p3);
  CHECK(p3 < p1);

  SubjectAccuracies no_rf = data;
  no_rf.algorithms = {Algorithm::Lda};
  no_rf.accuracy.pop_back();
  CHECK(code_of([&] { render_subject_comparison(no_rf); }) == ErrorCode::MissingAlgorithm);
}

TEST_CASE("noise chart") {
  CleanReport clean;
  for (int s = 1; s <= 3; ++s) {
    UnitLoss u;
    u.subject_id = s;
    u.post_trim_count = 1000;
    u.removed_flatline_count = static_cast<std::size_t>(100 * s);
    u.retained_count = 1000 - u.removed_flatline_count;
    clean.subjects.push_back(u);
  }
  const auto s = two_algorithm_summary();
  const auto rows = noise_rows(clean, &s);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].noise == 0.2);
  CHECK(rows[1].retained == 0.8);
  CHECK(rows[1].rf_accuracy == 0.4);
  const auto svg = render_noise_chart(rows);
  CHECK(oracle::svg_problem(svg).empty());
  CHECK(svg.find("stroke-dasharray") != std::string::npos);

  auto broken = rows;
  broken[0].retained = 0.5;
  CHECK(code_of([&] { render_noise_chart(broken); }) == ErrorCode::AccountingMismatch);
}

TEST_CASE("figure file names") {
  CHECK(heatmap_file_name(3, Algorithm::RbfSvm) == "fig7_subject3_rbf_svm.svg");
}
