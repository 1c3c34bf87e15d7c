#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "eeg4/cleaning.hpp"
#include "eeg4/types.hpp"

namespace eeg4 {

struct CvConfig {
  std::size_t folds = 7;
  double fold_loss_threshold = 0.65;
  double trim_fraction = 0.30;  // must match the cleaning trim; locates the post-trim window
  bool invert_folds = false;    // train on the single part, test on the rest
  bool per_session = false;     // one plan per session instead of pooling a subject's sessions

  void validate() const;
};

/// Time-based split of a cleaned task's post-trim window into k equal intervals.
struct PartAssignment {
  std::vector<double> boundaries;        // k + 1 timestamps
  std::vector<std::size_t> part_of;      // per surviving snapshot, 0-based part
  std::vector<std::size_t> counts;       // snapshots per part
  double nominal_per_part = 0.0;         // expected snapshots per part on a complete recording
};

PartAssignment make_parts(const TaskRecord& cleaned, std::size_t k, double trim_fraction, double sample_rate);

struct TaskParts {
  int session_index = 0;
  Task task = Task::Think;
  std::vector<double> boundaries;
  std::vector<std::size_t> counts;
  double nominal_per_part = 0.0;
};

struct FoldPlan {
  int subject_id = 0;
  std::size_t folds = 0;
  bool inverted = false;
  std::vector<TaskParts> parts;              // per (session, task)
  std::vector<double> nominal_counts;        // per fold: nominal snapshots in part i
  std::vector<std::size_t> retained_counts;  // per fold: surviving snapshots in part i
  std::vector<double> loss_fractions;        // per fold
  std::vector<std::size_t> retained_folds;   // 1-based fold numbers that survived
};

nlohmann::json to_json(const FoldPlan& plan);

struct Fold {
  std::size_t index = 0;  // 1-based
  bool retained = false;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// All of one subject's surviving snapshots, with their part labels and per-fold row sets.
struct FoldedDataset {
  int subject_id = 0;
  FeatureMatrix features;  // n x 20
  Labels labels;           // task label 0..4
  std::vector<std::uint32_t> part;
  std::vector<int> session_of_row;
  std::vector<Fold> folds;
};

struct FoldSplit {
  FeatureMatrix train_features;
  Labels train_labels;
  FeatureMatrix test_features;
  Labels test_labels;
};

/// Gathers the train/test rows of a fold, keeping only `feature_columns` (all 20 when empty).
FoldSplit materialize(const FoldedDataset& data, const Fold& fold, std::span<const std::size_t> feature_columns = {});

struct SubjectFolds {
  FoldPlan plan;
  FoldedDataset data;
};

/// Pools part i of every task of every session into fold i's test set and discards folds whose
/// test parts lost more than the fold-loss threshold of their nominal count. Throws NoUsableFolds.
SubjectFolds assemble_folds(const SubjectData& subject, const CvConfig& config);

}  // namespace eeg4
