#include "eeg4/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "eeg4/error.hpp"
#include "eeg4/random.hpp"

namespace eeg4 {

SynthConfig::SynthConfig() {
  constexpr std::array<double, kBandCount> band_level{0.8, 0.5, 0.6, 0.3, 0.1};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    baseline[f] = band_level[ChannelLayout::band_of(f)];
    variance[f] = 0.04;
  }
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    pattern[t].fill(0.0);
    for (std::size_t e = 0; e < kElectrodeCount; ++e) pattern[t][ChannelLayout::feature_index(e, t)] = 1.0;
  }
}

void SynthConfig::validate() const {
  const auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, "synth: " + msg); };
  if (subjects < 1) bad("subjects must be at least 1");
  if (sessions_per_subject < 1 || sessions_per_subject > 6) bad("sessions_per_subject must lie in 1..6");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) bad("sample_rate must be positive");
  if (!(task_duration > 0.0) || !std::isfinite(task_duration)) bad("task_duration must be positive");
  for (const double v : variance) {
    if (!(v > 0.0) || !std::isfinite(v)) bad("covariance entries must be positive");
  }
  if (!std::isfinite(separation) || separation < 0.0) bad("separation must be a non-negative number");
  if (!(temporal_corr >= 0.0 && temporal_corr < 1.0)) bad("temporal_corr must lie in [0,1)");
  if (!(flatline.rate_per_channel_minute >= 0.0) || !std::isfinite(flatline.rate_per_channel_minute))
    bad("flatline rate must be non-negative");
  if (!(flatline.min_seconds > 0.0) || !(flatline.max_seconds >= flatline.min_seconds) ||
      !std::isfinite(flatline.max_seconds))
    bad("flatline durations must be positive and min <= max");
}

FeatureVector SynthConfig::task_mean(Task task) const {
  FeatureVector m;
  const auto& p = pattern[static_cast<std::size_t>(task)];
  for (std::size_t f = 0; f < kFeatureCount; ++f) m[f] = baseline[f] + separation * std::sqrt(variance[f]) * p[f];
  return m;
}

namespace {

void inject_flatlines(const SynthConfig& config, Session& session, std::mt19937_64& rng,
                      std::vector<InjectedRun>& runs) {
  const double minutes = config.task_duration / 60.0;
  std::poisson_distribution<int> count(config.flatline.rate_per_channel_minute * minutes);
  std::uniform_real_distribution<double> duration(config.flatline.min_seconds, config.flatline.max_seconds);
  for (auto& rec : session.tasks) {
    const std::size_t n = rec.snapshots.size();
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      const int draws = config.flatline.rate_per_channel_minute > 0 ? count(rng) : 0;
      std::vector<InjectedRun> placed;
      for (int k = 0; k < draws; ++k) {
        const auto length = std::max<std::size_t>(
            1, std::min<std::size_t>(n, static_cast<std::size_t>(std::lround(duration(rng) * config.sample_rate))));
        std::uniform_int_distribution<std::size_t> where(0, n - length);
        const std::size_t start = where(rng);
        // Runs on one channel never touch, so each one stays a separate maximal run.
        const bool clash = std::any_of(placed.begin(), placed.end(), [&](const InjectedRun& r) {
          return start <= r.start + r.length && r.start <= start + length;
        });
        if (clash) continue;
        const double value = rec.snapshots[start].values[c];
        for (std::size_t i = start; i < start + length; ++i) rec.snapshots[i].values[c] = value;
        placed.push_back({session.subject_id, session.session_index, rec.task, c, start, length});
      }
      std::sort(placed.begin(), placed.end(), [](const InjectedRun& a, const InjectedRun& b) { return a.start < b.start; });
      runs.insert(runs.end(), placed.begin(), placed.end());
    }
  }
}

Session generate_session(const SynthConfig& config, int subject, int index, std::mt19937_64& rng) {
  Session s;
  s.subject_id = subject;
  s.session_index = index;
  s.sample_rate = config.sample_rate;
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> any_class(0, static_cast<int>(kTaskCount) - 1);
  std::array<FeatureVector, kTaskCount> means;
  for (std::size_t t = 0; t < kTaskCount; ++t) means[t] = config.task_mean(static_cast<Task>(t));
  FeatureVector sigma;
  for (std::size_t f = 0; f < kFeatureCount; ++f) sigma[f] = std::sqrt(config.variance[f]);
  const double rho = config.temporal_corr;
  const double innovation = std::sqrt(1.0 - rho * rho);
  const auto per_task = static_cast<std::size_t>(std::lround(config.task_duration * config.sample_rate));

  for (std::size_t t = 0; t < kTaskCount; ++t) {
    TaskRecord& rec = s.tasks[t];
    rec.task = kProtocolOrder[t];
    rec.start = static_cast<double>(t) * config.task_duration;
    rec.nominal_duration = config.task_duration;
    rec.snapshots.resize(per_task);
    FeatureVector dev;
    for (std::size_t f = 0; f < kFeatureCount; ++f) dev[f] = sigma[f] * normal(rng);
    for (std::size_t i = 0; i < per_task; ++i) {
      if (i > 0) {
        for (std::size_t f = 0; f < kFeatureCount; ++f) dev[f] = rho * dev[f] + innovation * sigma[f] * normal(rng);
      }
      const std::size_t cls = config.label_shuffle ? static_cast<std::size_t>(any_class(rng)) : t;
      SpectralSnapshot& snap = rec.snapshots[i];
      snap.timestamp = rec.start + static_cast<double>(i) / config.sample_rate;
      for (std::size_t f = 0; f < kFeatureCount; ++f) snap.values[f] = means[cls][f] + dev[f];
    }
  }
  return s;
}

}  // namespace

SynthCorpus generate_corpus(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus;
  for (int subject = 1; subject <= config.subjects; ++subject) {
    std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(subject)));
    for (int k = 1; k <= config.sessions_per_subject; ++k) {
      Session s = generate_session(config, subject, k, rng);
      inject_flatlines(config, s, rng, corpus.runs);
      validate_session(s);
      corpus.sessions.push_back(std::move(s));
    }
  }
  return corpus;
}

nlohmann::json to_json(const SynthConfig& config) {
  nlohmann::json pattern = nlohmann::json::array();
  for (const auto& p : config.pattern) pattern.push_back(p);
  return {{"subjects", config.subjects},
          {"sessions_per_subject", config.sessions_per_subject},
          {"sample_rate", config.sample_rate},
          {"task_duration", config.task_duration},
          {"baseline", config.baseline},
          {"variance", config.variance},
          {"pattern", pattern},
          {"separation", config.separation},
          {"temporal_corr", config.temporal_corr},
          {"flatline",
           {{"rate_per_channel_minute", config.flatline.rate_per_channel_minute},
            {"min_seconds", config.flatline.min_seconds},
            {"max_seconds", config.flatline.max_seconds}}},
          {"label_shuffle", config.label_shuffle},
          {"seed", config.seed}};
}

nlohmann::json manifest_json(const SynthConfig& config, const SynthCorpus& corpus) {
  nlohmann::json sessions = nlohmann::json::array();
  for (const auto& s : corpus.sessions) {
    std::vector<std::size_t> counts;
    for (const auto& t : s.tasks) counts.push_back(t.snapshots.size());
    sessions.push_back({{"subject", s.subject_id},
                        {"session", s.session_index},
                        {"file", session_file_name(s).string()},
                        {"task_snapshot_counts", counts}});
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : corpus.runs) {
    runs.push_back({{"subject", r.subject_id},
                    {"session", r.session_index},
                    {"task", task_name(r.task)},
                    {"channel", ChannelLayout::column_name(r.channel)},
                    {"channel_index", r.channel},
                    {"start", r.start},
                    {"length", r.length}});
  }
  return {{"format", "eeg4-synth-manifest"},
          {"version", 1},
          {"config", to_json(config)},
          {"task_means", [&] {
             nlohmann::json m = nlohmann::json::object();
             for (const Task t : kProtocolOrder) m[std::string(task_name(t))] = config.task_mean(t);
             return m;
           }()},
          {"sessions", sessions},
          {"flatline_runs", runs}};
}

std::filesystem::path session_file_name(const Session& session) {
  return "subject" + std::to_string(session.subject_id) + "_session" + std::to_string(session.session_index) + ".csv";
}

}  // namespace eeg4
