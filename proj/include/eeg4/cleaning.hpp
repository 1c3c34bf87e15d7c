#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

/// Which unit must hold a constant value for a snapshot run to count as flat.
enum class FlatlineScope {
  Channel,    // any single electrode-band channel
  Electrode,  // all five bands of one electrode at once
};

std::string_view flatline_scope_name(FlatlineScope scope);
FlatlineScope parse_flatline_scope(std::string_view name);

struct CleanConfig {
  double trim_fraction = 0.30;
  double flatline_seconds = 1.4;
  double session_loss_threshold = 0.65;
  double subject_loss_threshold = 0.65;
  double fold_loss_threshold = 0.65;
  FlatlineScope flatline_scope = FlatlineScope::Channel;

  // Throws InvalidConfig when a fraction leaves (0,1) or the flat-line window is under 2 samples.
  void validate(double sample_rate) const;
};

/// Number of leading snapshots removed from an n-snapshot task: ceil(fraction * n).
std::size_t trim_count(std::size_t n, double trim_fraction);

/// Minimum run length, in samples, that counts as a flat line: ceil(seconds * rate).
std::size_t flatline_run_length(double flatline_seconds, double sample_rate);

TaskRecord trim_transition(const TaskRecord& task, double trim_fraction);

/// Sorted indices of every snapshot inside a flat run of at least flatline_run_length samples.
/// Runs are maximal and judged per channel (or per electrode); the result is their union.
std::vector<std::size_t> detect_flatlines(const TaskRecord& task, double flatline_seconds, double sample_rate,
                                          FlatlineScope scope = FlatlineScope::Channel);

struct FlatlineRemoval {
  TaskRecord task;
  std::size_t removed = 0;
};

/// Deletes the flagged snapshots; survivors keep their order. `flagged` must be sorted and unique.
FlatlineRemoval remove_flatlines(const TaskRecord& task, std::span<const std::size_t> flagged);

struct TaskCleanStats {
  int subject_id = 0;
  int session_index = 0;
  Task task = Task::Think;
  std::size_t nominal_count = 0;
  std::size_t post_trim_count = 0;
  std::size_t removed_flatline_count = 0;
  std::size_t retained_count = 0;

  double loss_fraction() const;
};

/// Loss aggregated over a session (session_index > 0) or a whole subject (session_index == 0).
struct UnitLoss {
  int subject_id = 0;
  int session_index = 0;
  std::size_t nominal_count = 0;
  std::size_t post_trim_count = 0;
  std::size_t removed_flatline_count = 0;
  std::size_t retained_count = 0;
  double loss_fraction = 0.0;
  bool excluded = false;
};

struct CleanReport {
  std::vector<TaskCleanStats> tasks;  // subject, session, task order
  std::vector<UnitLoss> sessions;
  std::vector<UnitLoss> subjects;
  std::vector<std::pair<int, int>> excluded_sessions;  // (subject, session)
  std::vector<int> excluded_subjects;

  const UnitLoss* subject(int subject_id) const;
};

nlohmann::json to_json(const CleanReport& report);
CleanReport clean_report_from_json(const nlohmann::json& doc);
/// One row per subject x session x task.
std::string to_csv(const CleanReport& report);

struct CleanedSession {
  Session session;
  std::array<TaskCleanStats, kTaskCount> stats;
};

/// Trim, then detect and remove flat lines, for every task of a session.
CleanedSession clean_session(const Session& session, const CleanConfig& config);

/// The sessions of one subject that survived exclusion.
struct SubjectData {
  int subject_id = 0;
  std::vector<Session> sessions;
};

/// Builds the session/subject loss rows of `report` and drops excluded units (strict > thresholds).
std::vector<SubjectData> apply_exclusions(std::vector<CleanedSession> cleaned, const CleanConfig& config,
                                          CleanReport& report);

struct CleanResult {
  std::vector<SubjectData> retained;
  CleanReport report;
};

CleanResult clean_corpus(const std::vector<Session>& sessions, const CleanConfig& config);

}  // namespace eeg4
