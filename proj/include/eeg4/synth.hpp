#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "eeg4/types.hpp"

namespace eeg4 {

struct FlatlineInjection {
  double rate_per_channel_minute = 0.1;  // expected runs per channel per minute of recording
  double min_seconds = 1.5;
  double max_seconds = 4.0;
};

struct SynthConfig {
  int subjects = 12;
  int sessions_per_subject = 6;
  double sample_rate = 10.0;
  double task_duration = 60.0;
  FeatureVector baseline{};  // shared offset of every task mean
  FeatureVector variance;    // shared diagonal covariance
  // Unit mean pattern per task; the task mean is baseline + separation * sqrt(variance) * pattern.
  std::array<FeatureVector, kTaskCount> pattern;
  double separation = 1.0;
  double temporal_corr = 0.5;  // AR(1) coefficient of the deviations from the mean
  FlatlineInjection flatline;
  bool label_shuffle = false;  // generating class of each snapshot drawn independently of its task
  std::uint64_t seed = 1;

  SynthConfig();
  void validate() const;  // InvalidConfig
  FeatureVector task_mean(Task task) const;
};

struct InjectedRun {
  int subject_id = 0;
  int session_index = 0;
  Task task = Task::Think;
  std::size_t channel = 0;
  std::size_t start = 0;  // snapshot index within the task
  std::size_t length = 0;
};

struct SynthCorpus {
  std::vector<Session> sessions;  // subject-major, then session order
  std::vector<InjectedRun> runs;  // same order, then task, channel, start
};

SynthCorpus generate_corpus(const SynthConfig& config);

/// Generative parameters, per-session snapshot counts and every injected run.
nlohmann::json manifest_json(const SynthConfig& config, const SynthCorpus& corpus);

nlohmann::json to_json(const SynthConfig& config);

/// subject<id>_session<k>.csv
std::filesystem::path session_file_name(const Session& session);

}  // namespace eeg4
