#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eeg4/cleaning.hpp"
#include "eeg4/evaluation.hpp"

namespace eeg4 {

/// Column-normalized confusion as a colored grid; predicted task on Y, actual task on X.
/// DimensionMismatch unless the matrix is 5x5 with 5 labels; AccountingMismatch for entries outside [0,1].
std::string render_heatmap(const std::vector<std::vector<double>>& rates, const std::vector<std::string>& labels,
                           const std::string& title);
std::string render_heatmap(const RateMatrix& rates, const std::string& title);

struct SubjectAccuracies {
  std::vector<int> subjects;
  std::vector<Algorithm> algorithms;
  std::vector<std::vector<std::optional<double>>> accuracy;  // [algorithm][subject]
};

SubjectAccuracies subject_accuracies(const BenchmarkSummary& summary);

/// Subjects ordered by Random Forest accuracy ascending (ties and missing values by subject id,
/// missing last).
std::vector<std::size_t> subject_order(const std::vector<int>& subjects,
                                       const std::vector<std::optional<double>>& rf_accuracy);

/// One polyline per algorithm over the subjects; MissingAlgorithm when Random Forest is absent.
std::string render_subject_comparison(const SubjectAccuracies& data);

struct NoiseRow {
  int subject_id = 0;
  double noise = 0.0;     // fraction of post-trim snapshots removed as flat lines
  double retained = 0.0;  // fraction left to cross-validate
  std::optional<double> rf_accuracy;
};

/// Rows from the subject loss lines of a clean report, with RF accuracies where available.
std::vector<NoiseRow> noise_rows(const CleanReport& clean, const BenchmarkSummary* summary);

/// Stacked noise/retained bars with an accuracy marker and the exclusion guide line.
/// AccountingMismatch when noise + retained differs from 1 by more than 1e-9.
std::string render_noise_chart(const std::vector<NoiseRow>& rows, double exclusion_threshold = 0.65);

/// Algorithm scores by descending accuracy; equal accuracies by shorter runtime, then algorithm order.
std::vector<AlgorithmScore> table_order(const BenchmarkSummary& summary);

std::string render_table3_text(const BenchmarkSummary& summary);
/// algorithm,mean_accuracy,mean_runtime_s in table order with display names.
std::string render_table3_csv(const BenchmarkSummary& summary);

/// JSON object mapping algorithm names to baseline accuracies, e.g. {"RF": 0.64}.
std::map<Algorithm, double> read_baseline(const std::filesystem::path& path);
std::map<Algorithm, double> parse_baseline(const std::string& json_text);

/// algorithm,accuracy,baseline_accuracy in table order; the baseline cell is empty when unknown.
std::string render_table4_csv(const BenchmarkSummary& summary, const std::map<Algorithm, double>& baseline);

/// fig7_subject<id>_<algorithm id>.svg
std::string heatmap_file_name(int subject_id, Algorithm algorithm);

}  // namespace eeg4
