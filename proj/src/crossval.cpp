#include "eeg4/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "eeg4/error.hpp"
#include "eeg4/recording_io.hpp"

namespace eeg4 {

void CvConfig::validate() const {
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "fold count must be at least 2");
  if (!(fold_loss_threshold > 0.0 && fold_loss_threshold < 1.0))
    throw Error(ErrorCode::InvalidConfig, "fold_loss_threshold must lie in (0,1)");
  if (!(trim_fraction > 0.0 && trim_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "trim_fraction must lie in (0,1)");
}

PartAssignment make_parts(const TaskRecord& cleaned, std::size_t k, double trim_fraction, double sample_rate) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "part count must be at least 2");
  PartAssignment out;
  const double window_start = cleaned.start + trim_fraction * cleaned.nominal_duration;
  const double width = (1.0 - trim_fraction) * cleaned.nominal_duration / static_cast<double>(k);
  out.boundaries.resize(k + 1);
  for (std::size_t j = 0; j <= k; ++j) out.boundaries[j] = window_start + static_cast<double>(j) * width;

  const auto nominal = static_cast<std::size_t>(std::llround(cleaned.nominal_duration * sample_rate));
  out.nominal_per_part =
      static_cast<double>(nominal - trim_count(nominal, trim_fraction)) / static_cast<double>(k);

  out.counts.assign(k, 0);
  out.part_of.reserve(cleaned.snapshots.size());
  // Interior boundaries only: rows before the window (trim by count on a short task) land in
  // part 0, rows past its end (clock jitter) in part k-1.
  const auto first = out.boundaries.begin() + 1;
  const auto last = out.boundaries.end() - 1;
  for (const auto& snap : cleaned.snapshots) {
    const auto part = static_cast<std::size_t>(std::upper_bound(first, last, snap.timestamp) - first);
    out.part_of.push_back(part);
    ++out.counts[part];
  }
  return out;
}

SubjectFolds assemble_folds(const SubjectData& subject, const CvConfig& config) {
  config.validate();
  if (subject.sessions.empty())
    throw Error(ErrorCode::NoUsableFolds, "subject " + std::to_string(subject.subject_id) + " has no sessions");
  const std::size_t k = config.folds;

  SubjectFolds out;
  FoldPlan& plan = out.plan;
  FoldedDataset& data = out.data;
  plan.subject_id = data.subject_id = subject.subject_id;
  plan.folds = k;
  plan.inverted = config.invert_folds;
  plan.nominal_counts.assign(k, 0.0);
  plan.retained_counts.assign(k, 0);

  std::size_t rows = 0;
  for (const auto& s : subject.sessions) rows += s.snapshot_count();
  data.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(kFeatureCount));
  data.labels.reserve(rows);
  data.part.reserve(rows);
  data.session_of_row.reserve(rows);

  std::size_t r = 0;
  for (const auto& session : subject.sessions) {
    for (const auto& task : session.tasks) {
      const auto parts = make_parts(task, k, config.trim_fraction, session.sample_rate);
      for (std::size_t i = 0; i < task.snapshots.size(); ++i, ++r) {
        for (std::size_t f = 0; f < kFeatureCount; ++f)
          data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = task.snapshots[i].values[f];
        data.labels.push_back(task_label(task.task));
        data.part.push_back(static_cast<std::uint32_t>(parts.part_of[i]));
        data.session_of_row.push_back(session.session_index);
      }
      for (std::size_t j = 0; j < k; ++j) {
        plan.nominal_counts[j] += parts.nominal_per_part;
        plan.retained_counts[j] += parts.counts[j];
      }
      plan.parts.push_back({session.session_index, task.task, parts.boundaries, parts.counts, parts.nominal_per_part});
    }
  }

  plan.loss_fractions.resize(k);
  data.folds.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double nominal = plan.nominal_counts[j];
    const double loss =
        nominal > 0.0 ? std::max(0.0, 1.0 - static_cast<double>(plan.retained_counts[j]) / nominal) : 1.0;
    plan.loss_fractions[j] = loss;
    Fold& fold = data.folds[j];
    fold.index = j + 1;
    fold.retained = !(loss > config.fold_loss_threshold);
    if (fold.retained) plan.retained_folds.push_back(j + 1);
  }
  if (plan.retained_folds.empty())
    throw Error(ErrorCode::NoUsableFolds,
                "all " + std::to_string(k) + " folds of subject " + std::to_string(subject.subject_id) +
                    " lost more than " + format_number(config.fold_loss_threshold) + " of their data");

  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t j = 0; j < k; ++j) {
      const bool in_part = data.part[row] == j;
      const bool is_test = config.invert_folds ? !in_part : in_part;
      (is_test ? data.folds[j].test_rows : data.folds[j].train_rows).push_back(row);
    }
  }
  return out;
}

FoldSplit materialize(const FoldedDataset& data, const Fold& fold, std::span<const std::size_t> feature_columns) {
  std::vector<std::size_t> all;
  if (feature_columns.empty()) {
    all.resize(static_cast<std::size_t>(data.features.cols()));
    std::iota(all.begin(), all.end(), 0);
    feature_columns = all;
  }
  const auto gather = [&](const std::vector<std::size_t>& rows, FeatureMatrix& x, Labels& y) {
    x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_columns.size()));
    y.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t c = 0; c < feature_columns.size(); ++c)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            data.features(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(feature_columns[c]));
      y[i] = data.labels[rows[i]];
    }
  };
  FoldSplit split;
  gather(fold.train_rows, split.train_features, split.train_labels);
  gather(fold.test_rows, split.test_features, split.test_labels);
  return split;
}

nlohmann::json to_json(const FoldPlan& plan) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : plan.parts) {
    parts.push_back({{"session", p.session_index},
                     {"task", task_name(p.task)},
                     {"boundaries", p.boundaries},
                     {"counts", p.counts},
                     {"nominal_per_part", p.nominal_per_part}});
  }
  return {{"subject", plan.subject_id},
          {"folds", plan.folds},
          {"inverted", plan.inverted},
          {"nominal_counts", plan.nominal_counts},
          {"retained_counts", plan.retained_counts},
          {"loss_fractions", plan.loss_fractions},
          {"retained_folds", plan.retained_folds},
          {"parts", parts}};
}

}  // namespace eeg4
