#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace eeg4 {

inline constexpr std::size_t kElectrodeCount = 4;
inline constexpr std::size_t kBandCount = 5;
inline constexpr std::size_t kFeatureCount = kElectrodeCount * kBandCount;
inline constexpr std::size_t kTaskCount = 5;

/// The five protocol tasks, in recording order.
enum class Task : std::uint8_t { Think = 0, Count = 1, Recall = 2, Breathe = 3, Draw = 4 };

inline constexpr std::array<Task, kTaskCount> kProtocolOrder{Task::Think, Task::Count, Task::Recall,
                                                             Task::Breathe, Task::Draw};

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);
inline int task_label(Task task) { return static_cast<int>(task); }

/// Fixed electrode x band layout; feature index = electrode * 5 + band.
struct ChannelLayout {
  static constexpr std::array<std::string_view, kElectrodeCount> electrodes{"TP9", "AF7", "AF8", "TP10"};
  static constexpr std::array<std::string_view, kBandCount> bands{"delta", "theta", "alpha", "beta", "gamma"};

  static constexpr std::size_t feature_index(std::size_t electrode, std::size_t band) {
    return electrode * kBandCount + band;
  }
  static constexpr std::size_t electrode_of(std::size_t feature) { return feature / kBandCount; }
  static constexpr std::size_t band_of(std::size_t feature) { return feature % kBandCount; }

  // "TP9_delta"
  static std::string column_name(std::size_t feature);
  static std::optional<std::size_t> electrode_index(std::string_view name);
  static std::optional<std::size_t> band_index(std::string_view name);
};

using FeatureVector = std::array<double, kFeatureCount>;

struct SpectralSnapshot {
  double timestamp = 0.0;  // seconds since session start
  FeatureVector values{};
};

struct TaskRecord {
  Task task = Task::Think;
  std::vector<SpectralSnapshot> snapshots;
  double start = 0.0;              // task onset, seconds since session start
  double nominal_duration = 60.0;  // seconds
};

struct Session {
  int subject_id = 1;
  int session_index = 1;
  double sample_rate = 10.0;
  std::array<TaskRecord, kTaskCount> tasks;

  std::size_t snapshot_count() const;
};

// Checks the Session invariants (ids, task order, monotone timestamps, rate bound).
void validate_session(const Session& session);

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Labels = std::vector<int>;

}  // namespace eeg4
