#include "eeg4/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "eeg4/error.hpp"
#include "eeg4/random.hpp"
#include "eeg4/recording_io.hpp"

namespace eeg4 {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_labels(std::span<const int> labels, const char* what) {
  for (const int l : labels) {
    if (l < 0 || l >= static_cast<int>(kTaskCount))
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + " label outside the five tasks");
  }
}

}  // namespace

FoldResult evaluate_fold(const ModelSpec& spec, const FoldSplit& split, int subject_id, std::size_t fold_index,
                         bool timed) {
  FoldResult r;
  r.subject_id = subject_id;
  r.algorithm = spec.algorithm;
  r.fold_index = fold_index;
  r.test_count = split.test_labels.size();
  check_labels(split.train_labels, "training");
  check_labels(split.test_labels, "test");
  if (static_cast<std::size_t>(split.test_features.rows()) != r.test_count ||
      static_cast<std::size_t>(split.train_features.rows()) != split.train_labels.size())
    throw Error(ErrorCode::DimensionMismatch, "fold rows and labels differ in count");

  try {
    if (r.test_count == 0) throw Error(ErrorCode::NoUsableFolds, "fold has no test rows");
    std::array<bool, kTaskCount> seen{};
    for (const int l : split.train_labels) seen[static_cast<std::size_t>(l)] = true;
    for (std::size_t t = 0; t < kTaskCount; ++t) {
      if (!seen[t])
        throw Error(ErrorCode::DegenerateTrainingSet,
                    "task " + std::string(task_name(static_cast<Task>(t))) + " absent from the training rows");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const TrainedModel model = fit(spec, split.train_features, split.train_labels);
    if (timed) r.fit_seconds = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const Labels predicted = predict(model, split.test_features);
    if (timed) r.predict_seconds = seconds_since(t1);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const auto p = static_cast<std::size_t>(predicted[i]);
      const auto a = static_cast<std::size_t>(split.test_labels[i]);
      ++r.confusion[p][a];
      if (p == a) ++r.correct_count;
    }
    r.accuracy = static_cast<double>(r.correct_count) / static_cast<double>(r.test_count);
  } catch (const Error& e) {
    r.correct_count = 0;
    r.accuracy = 0.0;
    r.confusion = {};
    r.fit_seconds = r.predict_seconds = 0.0;
    r.failed = true;
    r.failure = e.what();
  }
  return r;
}

RateMatrix normalize_columns(const ConfusionMatrix& counts) {
  RateMatrix out{};
  for (std::size_t a = 0; a < kTaskCount; ++a) {
    std::size_t total = 0;
    for (std::size_t p = 0; p < kTaskCount; ++p) total += counts[p][a];
    if (total == 0) continue;
    for (std::size_t p = 0; p < kTaskCount; ++p)
      out[p][a] = static_cast<double>(counts[p][a]) / static_cast<double>(total);
  }
  return out;
}

AggregatedConfusion aggregate_confusion(std::span<const FoldResult> folds) {
  AggregatedConfusion out;
  for (const auto& f : folds) {
    if (f.failed) continue;
    for (std::size_t p = 0; p < kTaskCount; ++p)
      for (std::size_t a = 0; a < kTaskCount; ++a) out.counts[p][a] += f.confusion[p][a];
  }
  out.normalized = normalize_columns(out.counts);
  return out;
}

const SubjectScore* BenchmarkSummary::score(int subject_id, Algorithm algorithm) const {
  for (const auto& s : per_subject) {
    if (s.subject_id == subject_id && s.algorithm == algorithm) return &s;
  }
  return nullptr;
}

const AlgorithmScore* BenchmarkSummary::score(Algorithm algorithm) const {
  for (const auto& s : per_algorithm) {
    if (s.algorithm == algorithm) return &s;
  }
  return nullptr;
}

std::uint64_t fold_seed(std::uint64_t base, int subject_id, Algorithm algorithm, std::size_t fold_index) {
  std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(subject_id));
  s = derive_seed(s, static_cast<std::uint64_t>(algorithm));
  return derive_seed(s, fold_index);
}

void summarize(BenchmarkSummary& summary) {
  summary.per_subject.clear();
  summary.per_algorithm.clear();
  for (const int subject : summary.subjects) {
    for (const Algorithm a : summary.algorithms) {
      std::vector<FoldResult> mine;
      for (const auto& f : summary.folds) {
        if (f.subject_id == subject && f.algorithm == a) mine.push_back(f);
      }
      SubjectScore s;
      s.subject_id = subject;
      s.algorithm = a;
      double acc = 0.0;
      for (const auto& f : mine) {
        if (f.failed) {
          ++s.folds_failed;
          continue;
        }
        ++s.folds_used;
        acc += f.accuracy;
        s.runtime_seconds += f.fit_seconds + f.predict_seconds;
      }
      if (s.folds_used == 0) continue;
      s.accuracy = acc / static_cast<double>(s.folds_used);
      s.confusion = aggregate_confusion(mine);
      summary.per_subject.push_back(s);
    }
  }
  for (const Algorithm a : summary.algorithms) {
    AlgorithmScore out;
    out.algorithm = a;
    double acc = 0.0, runtime = 0.0;
    for (const auto& s : summary.per_subject) {
      if (s.algorithm != a) continue;
      ++out.subjects;
      acc += s.accuracy;
      runtime += s.runtime_seconds;
    }
    if (out.subjects == 0) continue;
    out.mean_accuracy = acc / static_cast<double>(out.subjects);
    out.mean_runtime_seconds = runtime / static_cast<double>(out.subjects);
    summary.per_algorithm.push_back(out);
  }
}

namespace {

struct Job {
  const SubjectFolds* subject;
  const Fold* fold;
  Algorithm algorithm;
};

FoldResult run_job(const Job& job, const BenchmarkOptions& options) {
  ModelSpec spec;
  spec.algorithm = job.algorithm;
  spec.hyper = options.hyper;
  spec.seed = fold_seed(options.seed, job.subject->data.subject_id, job.algorithm, job.fold->index);
  const FoldSplit split = materialize(job.subject->data, *job.fold, options.features);
  return evaluate_fold(spec, split, job.subject->data.subject_id, job.fold->index, options.timed);
}

}  // namespace

BenchmarkSummary run_benchmark(std::span<const SubjectFolds> subjects, std::span<const Algorithm> algorithms,
                               const BenchmarkOptions& options) {
  if (subjects.empty()) throw Error(ErrorCode::AllSubjectsExcluded, "no retained subject to benchmark");
  BenchmarkSummary summary;
  summary.algorithms.assign(algorithms.begin(), algorithms.end());
  std::vector<Job> jobs;
  for (const auto& s : subjects) {
    summary.subjects.push_back(s.data.subject_id);
    for (const Algorithm a : algorithms) {
      for (const auto& f : s.data.folds) {
        if (f.retained) jobs.push_back({&s, &f, a});
      }
    }
  }

  std::vector<std::optional<FoldResult>> results(jobs.size());
  const auto report = [&](std::size_t i) {
    const FoldResult& r = *results[i];
    if (r.failed) {
      summary.log.push_back("subject " + std::to_string(r.subject_id) + " " + std::string(algorithm_id(r.algorithm)) +
                            " fold " + std::to_string(r.fold_index) + " failed: " + r.failure);
    }
    if (options.on_fold) options.on_fold(r);
  };

  std::size_t threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      results[i] = run_job(jobs[i], options);
      report(i);
    }
  } else {
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          std::optional<FoldResult> r;
          try {
            r = run_job(jobs[i], options);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure) failure = std::current_exception();
            next = jobs.size();
          }
          std::lock_guard lock(mutex);
          results[i] = std::move(r);
          ready.notify_all();
        }
      });
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return results[i].has_value() || failure; });
      if (failure) break;
      lock.unlock();
      report(i);
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
  }

  for (auto& r : results) summary.folds.push_back(std::move(*r));
  summarize(summary);
  return summary;
}

namespace {

nlohmann::json matrix_json(const ConfusionMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

nlohmann::json matrix_json(const RateMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

Algorithm algorithm_from(const nlohmann::json& v) {
  const auto a = parse_algorithm(v.get<std::string>());
  if (!a) throw Error(ErrorCode::InvalidConfig, "unknown algorithm " + v.get<std::string>());
  return *a;
}

}  // namespace

nlohmann::json to_json(const BenchmarkSummary& summary) {
  nlohmann::json algos = nlohmann::json::array();
  for (const Algorithm a : summary.algorithms) algos.push_back(algorithm_id(a));
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : summary.folds) {
    nlohmann::json j{{"subject", f.subject_id},
                     {"algorithm", algorithm_id(f.algorithm)},
                     {"fold", f.fold_index},
                     {"test_count", f.test_count},
                     {"correct_count", f.correct_count},
                     {"accuracy", f.accuracy},
                     {"confusion", matrix_json(f.confusion)},
                     {"fit_seconds", f.fit_seconds},
                     {"predict_seconds", f.predict_seconds},
                     {"failed", f.failed}};
    if (f.failed) j["failure"] = f.failure;
    folds.push_back(std::move(j));
  }
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : summary.per_subject) {
    subjects.push_back({{"subject", s.subject_id},
                        {"algorithm", algorithm_id(s.algorithm)},
                        {"accuracy", s.accuracy},
                        {"runtime_seconds", s.runtime_seconds},
                        {"folds_used", s.folds_used},
                        {"folds_failed", s.folds_failed},
                        {"confusion", matrix_json(s.confusion.counts)},
                        {"confusion_normalized", matrix_json(s.confusion.normalized)}});
  }
  nlohmann::json per_algo = nlohmann::json::array();
  for (const auto& a : summary.per_algorithm) {
    per_algo.push_back({{"algorithm", algorithm_id(a.algorithm)},
                        {"name", algorithm_display_name(a.algorithm)},
                        {"mean_accuracy", a.mean_accuracy},
                        {"mean_runtime_seconds", a.mean_runtime_seconds},
                        {"subjects", a.subjects}});
  }
  return {{"format", "eeg4-benchmark"},
          {"version", 1},
          {"algorithms", algos},
          {"subjects", summary.subjects},
          {"per_algorithm", per_algo},
          {"per_subject", subjects},
          {"folds", folds},
          {"log", summary.log}};
}

BenchmarkSummary benchmark_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "eeg4-benchmark")
      throw Error(ErrorCode::InvalidConfig, "not a benchmark document");
    BenchmarkSummary s;
    for (const auto& a : doc.at("algorithms")) s.algorithms.push_back(algorithm_from(a));
    s.subjects = doc.at("subjects").get<std::vector<int>>();
    for (const auto& j : doc.at("folds")) {
      FoldResult f;
      f.subject_id = j.at("subject").get<int>();
      f.algorithm = algorithm_from(j.at("algorithm"));
      f.fold_index = j.at("fold").get<std::size_t>();
      f.test_count = j.at("test_count").get<std::size_t>();
      f.correct_count = j.at("correct_count").get<std::size_t>();
      f.accuracy = j.at("accuracy").get<double>();
      const auto& m = j.at("confusion");
      if (m.size() != kTaskCount) throw Error(ErrorCode::DimensionMismatch, "confusion matrix must be 5x5");
      for (std::size_t p = 0; p < kTaskCount; ++p) {
        const auto row = m.at(p).get<std::vector<std::size_t>>();
        if (row.size() != kTaskCount) throw Error(ErrorCode::DimensionMismatch, "confusion matrix must be 5x5");
        std::copy(row.begin(), row.end(), f.confusion[p].begin());
      }
      f.fit_seconds = j.at("fit_seconds").get<double>();
      f.predict_seconds = j.at("predict_seconds").get<double>();
      f.failed = j.at("failed").get<bool>();
      f.failure = j.value("failure", "");
      s.folds.push_back(std::move(f));
    }
    if (doc.contains("log")) s.log = doc.at("log").get<std::vector<std::string>>();
    summarize(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed benchmark document: ") + e.what());
  }
}

std::string algorithm_csv(const BenchmarkSummary& summary) {
  std::ostringstream out;
  out << "algorithm,mean_accuracy,mean_runtime_s\n";
  for (const auto& a : summary.per_algorithm) {
    out << algorithm_id(a.algorithm) << ',' << format_number(a.mean_accuracy) << ','
        << format_number(a.mean_runtime_seconds) << '\n';
  }
  return out.str();
}

std::string subject_csv(const BenchmarkSummary& summary) {
  std::ostringstream out;
  out << "subject,algorithm,accuracy\n";
  for (const auto& s : summary.per_subject)
    out << s.subject_id << ',' << algorithm_id(s.algorithm) << ',' << format_number(s.accuracy) << '\n';
  return out.str();
}

std::string confusion_csv(const BenchmarkSummary& summary) {
  std::ostringstream out;
  out << "subject,algorithm,predicted,actual,count,rate\n";
  for (const auto& s : summary.per_subject) {
    for (std::size_t p = 0; p < kTaskCount; ++p) {
      for (std::size_t a = 0; a < kTaskCount; ++a) {
        out << s.subject_id << ',' << algorithm_id(s.algorithm) << ',' << task_name(static_cast<Task>(p)) << ','
            << task_name(static_cast<Task>(a)) << ',' << s.confusion.counts[p][a] << ','
            << format_number(s.confusion.normalized[p][a]) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace eeg4
