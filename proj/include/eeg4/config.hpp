#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eeg4/cleaning.hpp"
#include "eeg4/crossval.hpp"
#include "eeg4/learners.hpp"
#include "eeg4/synth.hpp"

namespace eeg4 {

/// A value of the TOML subset understood by the config reader: strings, integers, floats,
/// booleans and (possibly nested) arrays of those.
struct TomlValue {
  using Array = std::vector<TomlValue>;
  std::variant<std::string, std::int64_t, double, bool, Array> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  std::string describe() const;
};

/// Flattened document: "table.key" -> value, in file order of first appearance.
using TomlTable = std::vector<std::pair<std::string, TomlValue>>;

/// Tables ([a] and [a.b]), dotted and quoted keys, comments, basic and literal strings, integers,
/// floats, booleans and arrays (may span lines). Inline tables, dates and multi-line strings are
/// rejected with InvalidConfig.
TomlTable parse_toml(std::string_view text, const std::string& source = "<config>");

/// A single TOML value; bare words that are not TOML values are taken as strings.
TomlValue parse_toml_value(std::string_view text);

enum class InputFormat { Canonical, MindMonitor };

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  InputFormat format = InputFormat::Canonical;
  std::optional<std::filesystem::path> boundaries;  // Mind Monitor sidecar, single input only
  double sample_rate = 10.0;
  double task_duration = 60.0;
  std::optional<SynthConfig> synth;  // explicit [synth] settings
  CleanConfig clean;
  CvConfig cv;
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<std::size_t> features;  // sorted feature columns; empty = all 20
  Hyperparameters hyper;
  std::size_t threads = 0;  // 0 = one per hardware thread
  bool timing = true;       // false: every runtime is reported as 0
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::filesystem::path> baseline;
  std::optional<std::filesystem::path> benchmark_file;     // report stage input
  std::optional<std::filesystem::path> clean_report_file;  // report stage input

  /// Synthetic input is used when no input paths are given.
  bool synthetic() const { return inputs.empty(); }
  /// The generator settings in effect (defaults when no [synth] key was set).
  SynthConfig synth_config() const;

  /// Applies one "table.key" setting; InvalidConfig for unknown keys or ill-typed values.
  void set(const std::string& key, const TomlValue& value);
  void set(const std::string& key, std::string_view text) { set(key, parse_toml_value(text)); }
  void apply(const TomlTable& table);
  void load(const std::filesystem::path& path);

  /// Cross-field checks (also validates the clean, cv, model and synth settings).
  void validate() const;

  nlohmann::json to_json() const;
};

/// Every key accepted by RunConfig::set, with a one-line description.
const std::vector<std::pair<std::string, std::string>>& config_keys();

}  // namespace eeg4
