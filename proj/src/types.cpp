#include "eeg4/types.hpp"

#include <cctype>
#include <cmath>

#include "eeg4/error.hpp"

namespace eeg4 {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadTaskLabel: return "BadTaskLabel";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::EmptyTask: return "EmptyTask";
    case ErrorCode::NoTaskMarkers: return "NoTaskMarkers";
    case ErrorCode::ClockSkew: return "ClockSkew";
    case ErrorCode::BoundaryCountMismatch: return "BoundaryCountMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NoUsableFolds: return "NoUsableFolds";
    case ErrorCode::AllSubjectsExcluded: return "AllSubjectsExcluded";
    case ErrorCode::DegenerateTrainingSet: return "DegenerateTrainingSet";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingAlgorithm: return "MissingAlgorithm";
    case ErrorCode::AccountingMismatch: return "AccountingMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return 2;
    case ErrorCode::Internal: return 4;
    default: return 3;
  }
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::Think: return "Think";
    case Task::Count: return "Count";
    case Task::Recall: return "Recall";
    case Task::Breathe: return "Breathe";
    case Task::Draw: return "Draw";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view name) {
  for (Task t : kProtocolOrder) {
    if (iequals(name, task_name(t))) return t;
  }
  return std::nullopt;
}

std::string ChannelLayout::column_name(std::size_t feature) {
  std::string name(electrodes[electrode_of(feature)]);
  name += '_';
  name += bands[band_of(feature)];
  return name;
}

std::optional<std::size_t> ChannelLayout::electrode_index(std::string_view name) {
  for (std::size_t e = 0; e < electrodes.size(); ++e) {
    if (iequals(name, electrodes[e])) return e;
  }
  return std::nullopt;
}

std::optional<std::size_t> ChannelLayout::band_index(std::string_view name) {
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (iequals(name, bands[b])) return b;
  }
  return std::nullopt;
}

std::size_t Session::snapshot_count() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.snapshots.size();
  return n;
}

void validate_session(const Session& session) {
  if (session.subject_id < 1)
    throw Error(ErrorCode::MalformedRow, "subject id must be positive, got " + std::to_string(session.subject_id));
  if (session.session_index < 1 || session.session_index > 6)
    throw Error(ErrorCode::MalformedRow,
                "session index must be within 1..6, got " + std::to_string(session.session_index));
  if (!(session.sample_rate > 0.0) || !std::isfinite(session.sample_rate))
    throw Error(ErrorCode::InvalidConfig, "sample rate must be positive");
  for (std::size_t i = 0; i < kTaskCount; ++i) {
    const TaskRecord& task = session.tasks[i];
    if (task.task != kProtocolOrder[i])
      throw Error(ErrorCode::BadTaskLabel, "task " + std::to_string(i) + " is out of protocol order");
    const double limit = task.nominal_duration * session.sample_rate * 1.05;
    if (static_cast<double>(task.snapshots.size()) > limit)
      throw Error(ErrorCode::MalformedRow, std::string(task_name(task.task)) + " holds " +
                                               std::to_string(task.snapshots.size()) +
                                               " snapshots, more than the sample rate allows");
    for (std::size_t k = 1; k < task.snapshots.size(); ++k) {
      if (!(task.snapshots[k].timestamp > task.snapshots[k - 1].timestamp))
        throw Error(ErrorCode::NonMonotonicTimestamp,
                    std::string(task_name(task.task)) + " snapshot " + std::to_string(k));
    }
  }
}

}  // namespace eeg4
