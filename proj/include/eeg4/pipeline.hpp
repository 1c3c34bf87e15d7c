#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eeg4/config.hpp"
#include "eeg4/recording_io.hpp"

namespace eeg4 {

enum class Stage { Synth, Clean, Cv, Bench, Report, Run };

std::string_view stage_name(Stage stage);

using LogSink = std::function<void(const std::string&)>;

/// Serializes every artifact write of a run into one directory, in call order.
class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir);

  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& doc);
  /// Writes the FAILED sentinel with the error text.
  void fail(const std::string& message, int exit_code);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

struct StageResult {
  int exit_code = 0;
  std::string message;  // error text when exit_code != 0
  std::vector<std::string> files;
};

/// Runs one stage (or the whole pipeline for Stage::Run) into config.out_dir. Errors are caught and
/// mapped to exit codes (2 usage, 3 data, 4 internal); once the output directory exists a failed
/// stage leaves its partial outputs plus a FAILED file.
StageResult run_stage(const RunConfig& config, Stage stage, const LogSink& log = {});

/// Sessions named by the config (parsed files or the synthetic corpus).
std::vector<Session> load_sessions(const RunConfig& config, const LogSink& log = {});

/// Mind Monitor subject and session ids from the first two integers of a file name
/// ("S03_session2.csv" -> 3, 2).
std::optional<std::pair<int, int>> ids_from_file_name(const std::filesystem::path& path);

/// Parses one file in the configured format.
ParsedSession parse_input(const RunConfig& config, const std::filesystem::path& path);

nlohmann::json to_json(const ParseReport& report);

}  // namespace eeg4
