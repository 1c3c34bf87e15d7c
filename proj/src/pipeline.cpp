#include "eeg4/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "eeg4/cleaning.hpp"
#include "eeg4/crossval.hpp"
#include "eeg4/error.hpp"
#include "eeg4/evaluation.hpp"
#include "eeg4/report.hpp"
#include "eeg4/synth.hpp"
#include "text.hpp"

namespace eeg4 {

namespace fs = std::filesystem;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Synth: return "synth";
    case Stage::Clean: return "clean";
    case Stage::Cv: return "cv";
    case Stage::Bench: return "bench";
    case Stage::Report: return "report";
    case Stage::Run: return "run";
  }
  return "?";
}

OutputWriter::OutputWriter(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) throw Error(ErrorCode::Io, "cannot create output directory " + dir_.string());
  fs::remove(dir_ / "FAILED", ec);
}

void OutputWriter::write(const std::string& name, const std::string& content) {
  write_text_file(dir_ / name, content);
  written_.push_back(name);
}

void OutputWriter::write_json(const std::string& name, const nlohmann::json& doc) { write(name, doc.dump(2) + "\n"); }

void OutputWriter::fail(const std::string& message, int exit_code) {
  write_text_file(dir_ / "FAILED", "exit " + std::to_string(exit_code) + "\n" + message + "\n");
}

std::optional<std::pair<int, int>> ids_from_file_name(const fs::path& path) {
  const std::string stem = path.stem().string();
  std::vector<int> numbers;
  for (std::size_t i = 0; i < stem.size() && numbers.size() < 2;) {
    if (!std::isdigit(static_cast<unsigned char>(stem[i]))) {
      ++i;
      continue;
    }
    int v = 0;
    std::size_t j = i;
    while (j < stem.size() && std::isdigit(static_cast<unsigned char>(stem[j])) && j - i < 9) v = v * 10 + (stem[j++] - '0');
    numbers.push_back(v);
    i = j;
  }
  if (numbers.size() < 2) return std::nullopt;
  return std::make_pair(numbers[0], numbers[1]);
}

ParsedSession parse_input(const RunConfig& config, const fs::path& path) {
  if (config.format == InputFormat::Canonical) return parse_canonical_csv(path, config.sample_rate, config.task_duration);
  const auto ids = ids_from_file_name(path);
  if (!ids)
    throw Error(ErrorCode::InvalidConfig,
                path.string() + ": Mind Monitor file names must carry subject and session numbers, e.g. S3_session2.csv");
  MindMonitorOptions options;
  options.subject_id = ids->first;
  options.session_index = ids->second;
  options.sample_rate = config.sample_rate;
  options.task_duration = config.task_duration;
  if (config.boundaries) {
    options.boundaries = read_boundaries_json(*config.boundaries);
  } else {
    fs::path sidecar = path;
    sidecar.replace_extension(".boundaries.json");
    if (fs::exists(sidecar)) options.boundaries = read_boundaries_json(sidecar);
  }
  return parse_mind_monitor_csv(path, options);
}

nlohmann::json to_json(const ParseReport& report) {
  return {{"rows_read", report.rows_read},
          {"rows_rejected", report.rows_rejected},
          {"rows_out_of_order", report.rows_out_of_order},
          {"rows_discarded", report.rows_discarded},
          {"rejected_lines", report.rejected_lines}};
}

std::vector<Session> load_sessions(const RunConfig& config, const LogSink& log) {
  if (config.synthetic()) {
    const SynthConfig sc = config.synth_config();
    if (log) log("generating " + std::to_string(sc.subjects) + " synthetic subjects");
    return generate_corpus(sc).sessions;
  }
  std::vector<Session> sessions;
  std::set<std::pair<int, int>> seen;
  for (const auto& path : config.inputs) {
    ParsedSession parsed = parse_input(config, path);
    const Session& s = parsed.session;
    if (!seen.insert({s.subject_id, s.session_index}).second)
      throw Error(ErrorCode::InvalidConfig, path.string() + ": subject " + std::to_string(s.subject_id) + " session " +
                                                std::to_string(s.session_index) + " appears twice");
    if (log) {
      log(path.string() + ": " + std::to_string(s.snapshot_count()) + " snapshots, " +
          std::to_string(parsed.report.rows_rejected) + " rows rejected");
    }
    sessions.push_back(std::move(parsed.session));
  }
  std::sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    return std::tie(a.subject_id, a.session_index) < std::tie(b.subject_id, b.session_index);
  });
  return sessions;
}

namespace {

struct Context {
  const RunConfig& config;
  const LogSink& log;
  OutputWriter& out;
  std::vector<std::string> notes;  // deterministic messages kept in the artifacts

  void say(const std::string& msg) const {
    if (log) log(msg);
  }
};

CvConfig cv_config(const RunConfig& config) {
  CvConfig cv = config.cv;
  cv.trim_fraction = config.clean.trim_fraction;
  cv.fold_loss_threshold = config.clean.fold_loss_threshold;
  return cv;
}

void write_synth(Context& ctx) {
  const SynthConfig sc = ctx.config.synth_config();
  const SynthCorpus corpus = generate_corpus(sc);
  for (const auto& s : corpus.sessions) {
    std::ostringstream csv;
    write_canonical_csv(s, csv);
    ctx.out.write(session_file_name(s).string(), csv.str());
  }
  ctx.out.write_json("manifest.json", manifest_json(sc, corpus));
  ctx.say("wrote " + std::to_string(corpus.sessions.size()) + " sessions and manifest.json");
}

CleanResult clean_stage(Context& ctx, bool synth_manifest) {
  std::vector<Session> sessions;
  if (ctx.config.synthetic() && synth_manifest) {
    const SynthConfig sc = ctx.config.synth_config();
    ctx.say("generating " + std::to_string(sc.subjects) + " synthetic subjects");
    SynthCorpus corpus = generate_corpus(sc);
    ctx.out.write_json("synth_manifest.json", manifest_json(sc, corpus));
    sessions = std::move(corpus.sessions);
  } else {
    sessions = load_sessions(ctx.config, ctx.log);
  }
  CleanResult cleaned = clean_corpus(sessions, ctx.config.clean);
  ctx.out.write_json("clean_report.json", to_json(cleaned.report));
  ctx.out.write("clean_report.csv", to_csv(cleaned.report));
  ctx.say("cleaning kept " + std::to_string(cleaned.retained.size()) + " of " +
          std::to_string(cleaned.report.subjects.size()) + " subjects");
  if (cleaned.retained.empty())
    throw Error(ErrorCode::AllSubjectsExcluded, "every subject lost more than the exclusion threshold");
  return cleaned;
}

std::vector<SubjectFolds> cv_stage(Context& ctx, const CleanResult& cleaned, bool& partial) {
  std::vector<SubjectFolds> folds;
  nlohmann::json plans = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& subject : cleaned.retained) {
    try {
      folds.push_back(assemble_folds(subject, cv_config(ctx.config)));
      plans.push_back(to_json(folds.back().plan));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoUsableFolds) throw;
      partial = true;
      failures.push_back({{"subject", subject.subject_id}, {"error", e.what()}});
      ctx.notes.push_back(e.what());
      ctx.say(e.what());
    }
  }
  ctx.out.write_json("fold_plans.json", {{"plans", plans}, {"unusable_subjects", failures}});
  if (folds.empty()) throw Error(ErrorCode::NoUsableFolds, "no subject has a usable fold");
  return folds;
}

BenchmarkSummary bench_stage(Context& ctx, const std::vector<SubjectFolds>& folds) {
  BenchmarkOptions options;
  options.hyper = ctx.config.hyper;
  options.seed = ctx.config.seed;
  options.threads = ctx.config.threads;
  options.timed = ctx.config.timing;
  options.features = ctx.config.features;
  std::size_t done = 0, total = 0;
  for (const auto& s : folds) {
    for (const auto& f : s.data.folds) total += f.retained ? ctx.config.algorithms.size() : 0;
  }
  options.on_fold = [&](const FoldResult& r) {
    ++done;
    std::string line = "[" + std::to_string(done) + "/" + std::to_string(total) + "] subject " +
                       std::to_string(r.subject_id) + " " + std::string(algorithm_id(r.algorithm)) + " fold " +
                       std::to_string(r.fold_index) + ": ";
    line += r.failed ? "failed: " + r.failure : "accuracy " + format_number(r.accuracy);
    ctx.say(line);
  };
  BenchmarkSummary summary = run_benchmark(folds, ctx.config.algorithms, options);
  summary.log.insert(summary.log.begin(), ctx.notes.begin(), ctx.notes.end());
  ctx.out.write_json("benchmark.json", to_json(summary));
  ctx.out.write("benchmark_algorithms.csv", algorithm_csv(summary));
  ctx.out.write("benchmark_subjects.csv", subject_csv(summary));
  ctx.out.write("confusion.csv", confusion_csv(summary));
  return summary;
}

void report_stage(Context& ctx, const BenchmarkSummary& summary, const CleanReport* clean) {
  ctx.out.write("table3.txt", render_table3_text(summary));
  ctx.out.write("table3.csv", render_table3_csv(summary));
  std::map<Algorithm, double> baseline;
  if (ctx.config.baseline) baseline = read_baseline(*ctx.config.baseline);
  ctx.out.write("table4.csv", render_table4_csv(summary, baseline));

  const bool has_rf = std::find(summary.algorithms.begin(), summary.algorithms.end(), Algorithm::RandomForest) !=
                      summary.algorithms.end();
  if (has_rf) {
    ctx.out.write("fig5.svg", render_subject_comparison(subject_accuracies(summary)));
    if (clean) {
      ctx.out.write("fig6.svg", render_noise_chart(noise_rows(*clean, &summary), ctx.config.clean.subject_loss_threshold));
    } else {
      ctx.say("no clean report given; fig6.svg skipped");
    }
  } else {
    ctx.say("fig5.svg and fig6.svg order subjects by Random Forest accuracy; skipped without random_forest");
  }
  for (const auto& s : summary.per_subject) {
    const std::string title =
        "Subject " + std::to_string(s.subject_id) + ", " + std::string(algorithm_display_name(s.algorithm));
    ctx.out.write(heatmap_file_name(s.subject_id, s.algorithm), render_heatmap(s.confusion.normalized, title));
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + " is not valid JSON: " + e.what());
  }
}

// Returns true when some subject had no usable folds (the stage still completes).
bool execute(Context& ctx, Stage stage) {
  bool partial = false;
  switch (stage) {
    case Stage::Synth:
      write_synth(ctx);
      break;
    case Stage::Clean:
      clean_stage(ctx, false);
      break;
    case Stage::Cv: {
      const CleanResult cleaned = clean_stage(ctx, false);
      cv_stage(ctx, cleaned, partial);
      break;
    }
    case Stage::Bench: {
      const CleanResult cleaned = clean_stage(ctx, false);
      const auto folds = cv_stage(ctx, cleaned, partial);
      bench_stage(ctx, folds);
      break;
    }
    case Stage::Report: {
      if (!ctx.config.benchmark_file) throw Error(ErrorCode::InvalidConfig, "report needs a benchmark.json");
      const BenchmarkSummary summary = benchmark_from_json(read_json_file(*ctx.config.benchmark_file));
      std::optional<CleanReport> clean;
      if (ctx.config.clean_report_file) clean = clean_report_from_json(read_json_file(*ctx.config.clean_report_file));
      report_stage(ctx, summary, clean ? &*clean : nullptr);
      break;
    }
    case Stage::Run: {
      ctx.out.write_json("run_config.json", ctx.config.to_json());
      const CleanResult cleaned = clean_stage(ctx, true);
      const auto folds = cv_stage(ctx, cleaned, partial);
      const BenchmarkSummary summary = bench_stage(ctx, folds);
      report_stage(ctx, summary, &cleaned.report);
      break;
    }
  }
  return partial;
}

}  // namespace

StageResult run_stage(const RunConfig& config, Stage stage, const LogSink& log) {
  StageResult result;
  std::optional<OutputWriter> out;
  const auto failed = [&](int code, const std::string& message) {
    result.exit_code = code;
    result.message = message;
    if (out) {
      try {
        out->fail(message, code);
      } catch (const Error&) {
      }
      result.files = out->written();
    }
    return result;
  };
  try {
    config.validate();
    out.emplace(config.out_dir);
    Context ctx{config, log, *out, {}};
    const bool partial = execute(ctx, stage);
    result.files = out->written();
    if (partial) return failed(exit_code_for(ErrorCode::NoUsableFolds), "some subjects had no usable folds");
    return result;
  } catch (const Error& e) {
    return failed(exit_code_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return failed(4, "out of memory");
  } catch (const std::exception& e) {
    return failed(4, std::string("internal error: ") + e.what());
  }
}

}  // namespace eeg4
