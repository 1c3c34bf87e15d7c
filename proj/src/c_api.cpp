#include "eeg4/eeg4.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "eeg4/config.hpp"
#include "eeg4/error.hpp"
#include "eeg4/learners.hpp"
#include "eeg4/pipeline.hpp"
#include "eeg4/recording_io.hpp"

struct eeg4_config {
  eeg4::RunConfig config;
};

struct eeg4_model {
  eeg4::TrainedModel model;
};

namespace {

thread_local std::string last_error;

eeg4_status fail(eeg4_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

eeg4_status output_string(const std::string& text, char** out) {
  if (!out) return fail(EEG4_USAGE, "null output pointer");
  *out = duplicate(text);
  if (!*out) return fail(EEG4_INTERNAL, "out of memory");
  return EEG4_OK;
}

template <class F>
eeg4_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const eeg4::Error& e) {
    return fail(static_cast<eeg4_status>(eeg4::exit_code_for(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(EEG4_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EEG4_INTERNAL, std::string("internal error: ") + e.what());
  }
}

eeg4::FeatureMatrix feature_rows(const double* features, size_t rows, size_t cols) {
  if (!features && rows > 0) throw eeg4::Error(eeg4::ErrorCode::InvalidConfig, "null feature pointer");
  eeg4::FeatureMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (rows > 0) std::memcpy(x.data(), features, rows * cols * sizeof(double));
  return x;
}

}  // namespace

extern "C" {

const char* eeg4_version(void) { return "1.0.0"; }

const char* eeg4_last_error(void) { return last_error.c_str(); }

void eeg4_free(char* text) { std::free(text); }

eeg4_config* eeg4_config_new(void) {
  try {
    return new eeg4_config();
  } catch (...) {
    fail(EEG4_INTERNAL, "out of memory");
    return nullptr;
  }
}

void eeg4_config_free(eeg4_config* config) { delete config; }

eeg4_status eeg4_config_load(eeg4_config* config, const char* path) {
  if (!config || !path) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    config->config.load(path);
    return EEG4_OK;
  });
}

eeg4_status eeg4_config_set(eeg4_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    config->config.set(key, std::string_view(value));
    return EEG4_OK;
  });
}

eeg4_status eeg4_config_add_input(eeg4_config* config, const char* path) {
  if (!config || !path) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    config->config.inputs.emplace_back(path);
    return EEG4_OK;
  });
}

eeg4_status eeg4_config_set_out_dir(eeg4_config* config, const char* path) {
  if (!config || !path || !*path) return fail(EEG4_USAGE, "empty output directory");
  return guarded([&] {
    config->config.out_dir = path;
    return EEG4_OK;
  });
}

eeg4_status eeg4_config_validate(const eeg4_config* config) {
  if (!config) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    config->config.validate();
    return EEG4_OK;
  });
}

eeg4_status eeg4_config_to_json(const eeg4_config* config, char** json_out) {
  if (!config) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    nlohmann::json doc = config->config.to_json();
    doc["out_dir"] = config->config.out_dir.string();
    return output_string(doc.dump(2) + "\n", json_out);
  });
}

char* eeg4_config_keys(void) {
  std::string text;
  for (const auto& [key, help] : eeg4::config_keys()) text += key + "\t" + help + "\n";
  return duplicate(text);
}

eeg4_status eeg4_run_stage(const eeg4_config* config, eeg4_stage stage, eeg4_log_fn log, void* user) {
  if (!config) return fail(EEG4_USAGE, "null argument");
  if (stage < EEG4_STAGE_SYNTH || stage > EEG4_STAGE_RUN) return fail(EEG4_USAGE, "unknown stage");
  return guarded([&] {
    eeg4::LogSink sink;
    if (log) sink = [log, user](const std::string& line) { log(line.c_str(), user); };
    const eeg4::StageResult result = eeg4::run_stage(config->config, static_cast<eeg4::Stage>(stage), sink);
    if (result.exit_code != 0) return fail(static_cast<eeg4_status>(result.exit_code), result.message);
    return EEG4_OK;
  });
}

eeg4_status eeg4_parse_file(const eeg4_config* config, const char* path, const char* canonical_out,
                            char** json_out) {
  if (!config || !path) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    const eeg4::ParsedSession parsed = eeg4::parse_input(config->config, path);
    const eeg4::Session& s = parsed.session;
    nlohmann::json tasks = nlohmann::json::object();
    for (const auto& t : s.tasks) tasks[std::string(eeg4::task_name(t.task))] = t.snapshots.size();
    nlohmann::json doc{{"file", path},
                       {"subject", s.subject_id},
                       {"session", s.session_index},
                       {"snapshots", s.snapshot_count()},
                       {"task_snapshots", tasks},
                       {"report", eeg4::to_json(parsed.report)}};
    if (canonical_out) eeg4::write_canonical_csv(s, std::filesystem::path(canonical_out));
    if (json_out) return output_string(doc.dump(2) + "\n", json_out);
    return EEG4_OK;
  });
}

eeg4_status eeg4_model_fit(const eeg4_config* config, const char* algorithm, const double* features, size_t rows,
                           size_t cols, const int32_t* labels, uint64_t seed, eeg4_model** model_out) {
  if (!config || !algorithm || !model_out || (!labels && rows > 0)) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    const auto a = eeg4::parse_algorithm(algorithm);
    if (!a) return fail(EEG4_USAGE, std::string("unknown algorithm ") + algorithm);
    eeg4::ModelSpec spec{*a, config->config.hyper, seed};
    spec.validate();
    const eeg4::FeatureMatrix x = feature_rows(features, rows, cols);
    const std::vector<int> y(labels, labels + rows);
    auto* handle = new eeg4_model{eeg4::fit(spec, x, y)};
    *model_out = handle;
    return EEG4_OK;
  });
}

eeg4_status eeg4_model_predict(const eeg4_model* model, const double* features, size_t rows, size_t cols,
                               int32_t* labels_out) {
  if (!model || (!labels_out && rows > 0)) return fail(EEG4_USAGE, "null argument");
  return guarded([&] {
    const eeg4::Labels y = eeg4::predict(model->model, feature_rows(features, rows, cols));
    for (size_t i = 0; i < y.size(); ++i) labels_out[i] = y[i];
    return EEG4_OK;
  });
}

eeg4_status eeg4_model_to_json(const eeg4_model* model, char** json_out) {
  if (!model) return fail(EEG4_USAGE, "null argument");
  return guarded([&] { return output_string(model->model.to_json().dump() + "\n", json_out); });
}

void eeg4_model_free(eeg4_model* model) { delete model; }

}  // extern "C"
