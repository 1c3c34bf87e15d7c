#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eeg4/eeg4.h"

namespace {

struct ConfigDeleter {
  void operator()(eeg4_config* c) const { eeg4_config_free(c); }
};
using ConfigPtr = std::unique_ptr<eeg4_config, ConfigDeleter>;

std::string take_string(char* text) {
  std::string out = text ? text : "";
  eeg4_free(text);
  return out;
}

std::string toml_string(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

// Shared options; every field stays unset unless given on the command line.
struct Options {
  std::string config_file;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::vector<std::string> inputs;
  std::optional<std::string> format;
  std::optional<std::string> boundaries;
  std::optional<int> subjects;
  std::optional<int> sessions;
  std::optional<double> separation;
  bool label_shuffle = false;
  std::optional<std::string> algorithms;
  std::optional<int> threads;
  bool no_timing = false;
  std::optional<std::string> baseline;
  std::optional<std::string> benchmark;
  std::optional<std::string> clean_report;
  std::optional<std::string> canonical_out;
  bool quiet = false;
};

struct Command {
  CLI::App* app;
  eeg4_stage stage;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config_file, "TOML run configuration")->check(CLI::ExistingFile);
  sub->add_option("-o,--out-dir,--out", o.out_dir, "output directory");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--set", o.sets, "override a config key, e.g. --set cv.folds=7")->type_name("KEY=VALUE");
  sub->add_flag("-q,--quiet", o.quiet, "no progress lines on stderr");
}

void add_inputs(CLI::App* sub, Options& o) {
  sub->add_option("-i,--input", o.inputs, "session CSV files (synthetic data when omitted)");
  sub->add_option("--format", o.format, "canonical or mind_monitor");
  sub->add_option("--boundaries", o.boundaries, "task boundary JSON for a single Mind Monitor file");
}

void add_synth(CLI::App* sub, Options& o) {
  sub->add_option("--subjects", o.subjects, "synthetic subjects");
  sub->add_option("--sessions", o.sessions, "synthetic sessions per subject");
  sub->add_option("--separation", o.separation, "task mean separation in standard deviations");
  sub->add_flag("--label-shuffle", o.label_shuffle, "draw each snapshot's class independently of its task");
}

void add_bench(CLI::App* sub, Options& o) {
  sub->add_option("-a,--algorithms", o.algorithms, "comma-separated algorithm names or all");
  sub->add_option("-j,--threads", o.threads, "worker threads (0 = all)");
  sub->add_flag("--no-timing", o.no_timing, "report every runtime as 0");
}

void add_report(CLI::App* sub, Options& o, bool inputs) {
  if (inputs) {
    sub->add_option("--benchmark", o.benchmark, "benchmark.json from the bench stage")->required();
    sub->add_option("--clean-report", o.clean_report, "clean_report.json (enables fig6.svg)");
  }
  sub->add_option("--baseline", o.baseline, "JSON object of baseline accuracies for table4.csv");
}

eeg4_status set(eeg4_config* c, const std::string& key, const std::string& value) {
  const eeg4_status s = eeg4_config_set(c, key.c_str(), value.c_str());
  if (s != EEG4_OK) std::fprintf(stderr, "eeg4: %s\n", eeg4_last_error());
  return s;
}

// Defaults, then the config file, then --set, then dedicated flags.
eeg4_status build_config(eeg4_config* c, const Options& o) {
  eeg4_status s = EEG4_OK;
  const auto check = [&](eeg4_status r) {
    if (s == EEG4_OK) s = r;
  };
  if (!o.config_file.empty() && eeg4_config_load(c, o.config_file.c_str()) != EEG4_OK) {
    std::fprintf(stderr, "eeg4: %s\n", eeg4_last_error());
    return EEG4_USAGE;
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "eeg4: --set expects KEY=VALUE, got %s\n", kv.c_str());
      return EEG4_USAGE;
    }
    check(set(c, kv.substr(0, eq), kv.substr(eq + 1)));
  }
  if (!o.inputs.empty()) {
    std::string list = "[";
    for (std::size_t i = 0; i < o.inputs.size(); ++i) list += (i ? ", " : "") + toml_string(o.inputs[i]);
    check(set(c, "input.paths", list + "]"));
  }
  if (o.format) check(set(c, "input.format", toml_string(*o.format)));
  if (o.boundaries) check(set(c, "input.boundaries", toml_string(*o.boundaries)));
  if (o.seed) check(set(c, "seed", std::to_string(*o.seed)));
  if (o.subjects) check(set(c, "synth.subjects", std::to_string(*o.subjects)));
  if (o.sessions) check(set(c, "synth.sessions_per_subject", std::to_string(*o.sessions)));
  if (o.separation) check(set(c, "synth.separation", CLI::detail::to_string(*o.separation)));
  if (o.label_shuffle) check(set(c, "synth.label_shuffle", "true"));
  if (o.algorithms) check(set(c, "bench.algorithms", toml_string(*o.algorithms)));
  if (o.threads) check(set(c, "bench.threads", std::to_string(*o.threads)));
  if (o.no_timing) check(set(c, "bench.timing", "false"));
  if (o.baseline) check(set(c, "report.baseline", toml_string(*o.baseline)));
  if (o.benchmark) check(set(c, "report.benchmark", toml_string(*o.benchmark)));
  if (o.clean_report) check(set(c, "report.clean_report", toml_string(*o.clean_report)));
  if (o.out_dir) check(set(c, "out_dir", toml_string(*o.out_dir)));
  return s == EEG4_OK ? s : EEG4_USAGE;
}

int run_parse(eeg4_config* c, const Options& o) {
  if (o.inputs.empty()) {
    std::fprintf(stderr, "eeg4 parse: no input files\n");
    return EEG4_USAGE;
  }
  int status = EEG4_OK;
  std::string canonical_dir;
  if (o.canonical_out) {
    canonical_dir = *o.canonical_out;
    std::error_code ec;
    std::filesystem::create_directories(canonical_dir, ec);
  }
  for (const auto& path : o.inputs) {
    std::string converted;
    if (o.canonical_out) converted = (std::filesystem::path(canonical_dir) / std::filesystem::path(path).filename()).string();
    char* json = nullptr;
    const eeg4_status s = eeg4_parse_file(c, path.c_str(), o.canonical_out ? converted.c_str() : nullptr, &json);
    if (s != EEG4_OK) {
      std::fprintf(stderr, "eeg4 parse: %s: %s\n", path.c_str(), eeg4_last_error());
      if (status == EEG4_OK) status = s;
      continue;
    }
    std::cout << take_string(json);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG band-power task classification benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(eeg4_version()));
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "print every config key and exit");

  Options o;
  std::vector<Command> commands;
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus and its manifest");
  add_common(synth, o);
  add_synth(synth, o);
  commands.push_back({synth, EEG4_STAGE_SYNTH});

  auto* parse = app.add_subcommand("parse", "parse session files and print a JSON summary per file");
  add_common(parse, o);
  parse->add_option("files", o.inputs, "session files")->required();
  parse->add_option("--format", o.format, "canonical or mind_monitor");
  parse->add_option("--boundaries", o.boundaries, "task boundary JSON for a single Mind Monitor file");
  parse->add_option("--canonical-out", o.canonical_out, "also write each session as canonical CSV into this directory");

  auto* clean = app.add_subcommand("clean", "trim and drop flat lines; write clean_report.json/.csv");
  auto* cv = app.add_subcommand("cv", "clean, then write the time-wise fold plans");
  auto* bench = app.add_subcommand("bench", "clean, split and cross-validate every algorithm");
  auto* run = app.add_subcommand("run", "the whole pipeline including tables and figures");
  for (auto* sub : {clean, cv, bench, run}) {
    add_common(sub, o);
    add_inputs(sub, o);
    add_synth(sub, o);
  }
  for (auto* sub : {bench, run}) add_bench(sub, o);
  add_report(run, o, false);
  commands.push_back({clean, EEG4_STAGE_CLEAN});
  commands.push_back({cv, EEG4_STAGE_CV});
  commands.push_back({bench, EEG4_STAGE_BENCH});
  commands.push_back({run, EEG4_STAGE_RUN});

  auto* report = app.add_subcommand("report", "render tables and figures from a benchmark.json");
  add_common(report, o);
  add_report(report, o, true);
  commands.push_back({report, EEG4_STAGE_REPORT});

  if (argc == 2 && std::string(argv[1]) == "--list-keys") {
    std::cout << take_string(eeg4_config_keys());
    return 0;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return EEG4_USAGE;
  }

  ConfigPtr config(eeg4_config_new());
  if (!config) return EEG4_INTERNAL;
  if (const eeg4_status s = build_config(config.get(), o); s != EEG4_OK) return s;

  if (parse->parsed()) return run_parse(config.get(), o);

  for (const auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    const eeg4_status s = eeg4_run_stage(config.get(), cmd.stage, o.quiet ? nullptr : log_line, nullptr);
    if (s != EEG4_OK) std::fprintf(stderr, "eeg4 %s: %s\n", cmd.app->get_name().c_str(), eeg4_last_error());
    return s;
  }
  return EEG4_USAGE;
}
