#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "eeg4/eeg4.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  eeg4_free(s);
  return out;
}

void collect(const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); }

}  // namespace

TEST_CASE("config handle") {
  eeg4_config* c = eeg4_config_new();
  REQUIRE(c);
  CHECK(eeg4_config_set(c, "synth.subjects", "3") == EEG4_OK);
  CHECK(eeg4_config_set(c, "synth.wat", "3") == EEG4_USAGE);
  CHECK(std::string(eeg4_last_error()).find("synth.wat") != std::string::npos);
  CHECK(eeg4_config_set(c, nullptr, "3") == EEG4_USAGE);
  CHECK(eeg4_config_validate(c) == EEG4_OK);
  char* json = nullptr;
  REQUIRE(eeg4_config_to_json(c, &json) == EEG4_OK);
  const std::string text = take(json);
  CHECK(text.find("\"subjects\": 3") != std::string::npos);
  CHECK(take(eeg4_config_keys()).find("model.rf_trees\t") != std::string::npos);
  eeg4_config_free(c);
  eeg4_config_free(nullptr);
}

TEST_CASE("model fit and predict") {
  eeg4_config* c = eeg4_config_new();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const std::size_t rows = 100, cols = 20;
  std::vector<double> x(rows * cols);
  std::vector<int32_t> y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = static_cast<int32_t>(i % 5);
    for (std::size_t f = 0; f < cols; ++f) x[i * cols + f] = n(rng) + (f == static_cast<std::size_t>(y[i]) ? 6.0 : 0.0);
  }
  eeg4_model* m = nullptr;
  REQUIRE(eeg4_model_fit(c, "lda", x.data(), rows, cols, y.data(), 1, &m) == EEG4_OK);
  std::vector<int32_t> pred(rows, -1);
  REQUIRE(eeg4_model_predict(m, x.data(), rows, cols, pred.data()) == EEG4_OK);
  CHECK(pred == y);
  CHECK(eeg4_model_predict(m, x.data(), rows / 2, cols * 2, pred.data()) == EEG4_DATA);
  char* json = nullptr;
  REQUIRE(eeg4_model_to_json(m, &json) == EEG4_OK);
  CHECK(take(json).find("\"lda\"") != std::string::npos);
  eeg4_model_free(m);

  eeg4_model* bad = nullptr;
  CHECK(eeg4_model_fit(c, "perceptron", x.data(), rows, cols, y.data(), 1, &bad) == EEG4_USAGE);
  std::vector<int32_t> one(rows, 2);
  CHECK(eeg4_model_fit(c, "knn", x.data(), rows, cols, one.data(), 1, &bad) == EEG4_DATA);
  CHECK(bad == nullptr);
  eeg4_config_free(c);
}

TEST_CASE("stage run with logging and file parsing") {
  const fs::path dir = fs::temp_directory_path() / "eeg4_capi_test";
  fs::remove_all(dir);
  eeg4_config* c = eeg4_config_new();
  eeg4_config_set(c, "synth.subjects", "1");
  eeg4_config_set(c, "synth.sessions_per_subject", "1");
  REQUIRE(eeg4_config_set_out_dir(c, dir.string().c_str()) == EEG4_OK);
  std::vector<std::string> lines;
  REQUIRE(eeg4_run_stage(c, EEG4_STAGE_SYNTH, collect, &lines) == EEG4_OK);
  CHECK_FALSE(lines.empty());
  CHECK(eeg4_run_stage(c, static_cast<eeg4_stage>(42), nullptr, nullptr) == EEG4_USAGE);

  char* json = nullptr;
  const std::string file = (dir / "subject1_session1.csv").string();
  const std::string copy = (dir / "copy.csv").string();
  REQUIRE(eeg4_parse_file(c, file.c_str(), copy.c_str(), &json) == EEG4_OK);
  const std::string summary = take(json);
  CHECK(summary.find("\"snapshots\": 3000") != std::string::npos);
  CHECK(fs::file_size(copy) == fs::file_size(file));
  CHECK(eeg4_parse_file(c, (dir / "missing.csv").string().c_str(), nullptr, &json) == EEG4_DATA);
  eeg4_config_free(c);
  fs::remove_all(dir);
}
