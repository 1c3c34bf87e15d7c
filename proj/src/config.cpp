#include "eeg4/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

#include "eeg4/error.hpp"
#include "eeg4/recording_io.hpp"
#include "text.hpp"

namespace eeg4 {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

class TomlParser {
 public:
  TomlParser(std::string_view text, std::string source) : s_(text), source_(std::move(source)) {}

  TomlTable document() {
    TomlTable out;
    std::string prefix;
    std::vector<std::string> tables;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') error("arrays of tables are not supported");
        skip_ws();
        const std::string name = key_path();
        skip_ws();
        expect(']');
        end_of_line();
        if (std::find(tables.begin(), tables.end(), name) != tables.end()) error("table [" + name + "] defined twice");
        tables.push_back(name);
        prefix = name + ".";
        continue;
      }
      const std::string key = prefix + key_path();
      skip_ws();
      expect('=');
      skip_ws();
      TomlValue v = value();
      end_of_line();
      for (const auto& [k, _] : out) {
        if (k == key) error("key " + key + " defined twice");
      }
      out.emplace_back(key, std::move(v));
    }
    return out;
  }

  TomlValue single() {
    skip_ws();
    TomlValue v = value();
    skip_ws();
    if (!at_end()) error("trailing characters after value");
    return v;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  [[noreturn]] void error(const std::string& msg) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) line += s_[i] == '\n';
    fail(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') error("expected end of line");
    ++pos_;
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string key_part() {
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!at_end() && bare_char(peek())) ++pos_;
    if (pos_ == start) error("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string key_path() {
    std::string key = key_part();
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      skip_ws();
      key += "." + key_part();
      skip_ws();
    }
    return key;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string basic_string() {
    expect('"');
    if (s_.substr(pos_, 2) == "\"\"") error("multi-line strings are not supported");
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') error("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      const char e = s_[pos_++];
      switch (e) {
        case 'b': out += '\b'; break;
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'f': out += '\f'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          const std::size_t len = e == 'u' ? 4 : 8;
          std::uint32_t cp = 0;
          const auto hex = s_.substr(pos_, len);
          const auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
          if (ec != std::errc() || p != hex.data() + len || hex.size() != len) error("bad unicode escape");
          pos_ += len;
          append_utf8(out, cp);
          break;
        }
        default: error(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  std::string literal_string() {
    expect('\'');
    if (s_.substr(pos_, 2) == "''") error("multi-line strings are not supported");
    const std::size_t start = pos_;
    while (!at_end() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') error("unterminated string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  TomlValue array() {
    expect('[');
    TomlValue::Array items;
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        break;
      }
      items.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_blank_lines();
      expect(']');
      break;
    }
    return TomlValue{std::move(items)};
  }

  TomlValue scalar_word() {
    const std::size_t start = pos_;
    while (!at_end() && (bare_char(peek()) || peek() == '.' || peek() == '+' || peek() == ':')) ++pos_;
    const std::string_view word = s_.substr(start, pos_ - start);
    if (word.empty()) error("expected a value");
    if (word == "true") return TomlValue{true};
    if (word == "false") return TomlValue{false};
    std::string digits;
    for (const char c : word) {
      if (c != '_') digits += c;
    }
    std::string_view d = digits;
    const bool negative = !d.empty() && d.front() == '-';
    if (!d.empty() && (d.front() == '+' || d.front() == '-')) d.remove_prefix(1);
    if (d == "inf") return TomlValue{negative ? -std::numeric_limits<double>::infinity()
                                              : std::numeric_limits<double>::infinity()};
    if (d == "nan") return TomlValue{std::numeric_limits<double>::quiet_NaN()};
    if (d.size() > 1 && d[0] == '0' && std::isalpha(static_cast<unsigned char>(d[1])))
      error("only decimal numbers are supported");
    const bool is_float = d.find_first_of(".eE") != std::string_view::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
      if (ec != std::errc() || p != d.data() + d.size()) error("not a value: " + std::string(word));
      return TomlValue{negative ? -v : v};
    }
    double v = 0;
    const auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
    if (ec != std::errc() || p != d.data() + d.size()) error("not a value: " + std::string(word));
    return TomlValue{negative ? -v : v};
  }

  TomlValue value() {
    switch (peek()) {
      case '"': return TomlValue{basic_string()};
      case '\'': return TomlValue{literal_string()};
      case '[': return array();
      case '{': error("inline tables are not supported");
      default: return scalar_word();
    }
  }

  std::string_view s_;
  std::string source_;
  std::size_t pos_ = 0;
};

double as_double(const std::string& key, const TomlValue& v) {
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
  fail(key + " expects a number, got " + v.describe());
}

std::int64_t as_int(const std::string& key, const TomlValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return *i;
  fail(key + " expects an integer, got " + v.describe());
}

std::size_t as_count(const std::string& key, const TomlValue& v) {
  const auto i = as_int(key, v);
  if (i < 0) fail(key + " must not be negative");
  return static_cast<std::size_t>(i);
}

bool as_bool(const std::string& key, const TomlValue& v) {
  if (const auto* b = std::get_if<bool>(&v.data)) return *b;
  if (const auto* s = std::get_if<std::string>(&v.data)) {
    if (*s == "yes" || *s == "on") return true;
    if (*s == "no" || *s == "off") return false;
  }
  fail(key + " expects true or false, got " + v.describe());
}

std::string as_string(const std::string& key, const TomlValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  fail(key + " expects a string, got " + v.describe());
}

// Arrays of strings, or one comma-separated string.
std::vector<std::string> as_list(const std::string& key, const TomlValue& v) {
  std::vector<std::string> out;
  if (const auto* arr = std::get_if<TomlValue::Array>(&v.data)) {
    for (const auto& item : *arr) out.push_back(as_string(key, item));
    return out;
  }
  const std::string s = as_string(key, v);
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = std::min(s.find(',', start), s.size());
    const auto part = trim(std::string_view(s).substr(start, comma - start));
    if (!part.empty()) out.emplace_back(part);
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const TomlValue&)>;

struct KeySpec {
  std::string key;
  std::string help;
  Setter set;
};

SynthConfig& synth_of(RunConfig& c) {
  if (!c.synth) c.synth = SynthConfig{};
  return *c.synth;
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    const auto add = [&t](std::string key, std::string help, Setter s) {
      t.push_back({std::move(key), std::move(help), std::move(s)});
    };
    add("seed", "base seed of every random stream", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      const auto s = as_int(k, v);
      if (s < 0) fail(k + " must not be negative");
      c.seed = static_cast<std::uint64_t>(s);
    });
    add("out_dir", "output directory", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.out_dir = as_string(k, v);
    });
    add("sample_rate", "recording rate in Hz", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.sample_rate = as_double(k, v);
    });
    add("task_duration", "nominal task length in seconds", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.task_duration = as_double(k, v);
    });

    add("input.paths", "session files; synthetic data is generated when empty",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          c.inputs.clear();
          for (const auto& p : as_list(k, v)) c.inputs.emplace_back(p);
        });
    add("input.format", "canonical or mind_monitor", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      const std::string f = as_string(k, v);
      if (f == "canonical") {
        c.format = InputFormat::Canonical;
      } else if (f == "mind_monitor" || f == "mind-monitor" || f == "mindmonitor") {
        c.format = InputFormat::MindMonitor;
      } else {
        fail(k + " must be canonical or mind_monitor, got " + f);
      }
    });
    add("input.boundaries", "sidecar JSON with six task boundaries (single Mind Monitor file)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.boundaries = as_string(k, v); });

    add("synth.subjects", "subjects to generate", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      synth_of(c).subjects = static_cast<int>(as_count(k, v));
    });
    add("synth.sessions_per_subject", "sessions per subject (1..6)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          synth_of(c).sessions_per_subject = static_cast<int>(as_count(k, v));
        });
    add("synth.separation", "task mean spacing in standard deviations",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { synth_of(c).separation = as_double(k, v); });
    add("synth.temporal_corr", "AR(1) coefficient in [0,1)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { synth_of(c).temporal_corr = as_double(k, v); });
    add("synth.variance", "shared per-feature variance", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      synth_of(c).variance.fill(as_double(k, v));
    });
    add("synth.flatline_rate", "injected flat runs per channel-minute",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          synth_of(c).flatline.rate_per_channel_minute = as_double(k, v);
        });
    add("synth.flatline_min_seconds", "shortest injected run",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          synth_of(c).flatline.min_seconds = as_double(k, v);
        });
    add("synth.flatline_max_seconds", "longest injected run",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          synth_of(c).flatline.max_seconds = as_double(k, v);
        });
    add("synth.label_shuffle", "decouple snapshots from their task labels",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { synth_of(c).label_shuffle = as_bool(k, v); });
    add("synth.seed", "generator seed (defaults to seed)", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      const auto s = as_int(k, v);
      if (s < 0) fail(k + " must not be negative");
      synth_of(c);
      c.synth_seed = static_cast<std::uint64_t>(s);
    });

    add("clean.trim_fraction", "leading fraction of each task removed",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.clean.trim_fraction = as_double(k, v); });
    add("clean.flatline_seconds", "shortest constant run treated as a flat line",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.clean.flatline_seconds = as_double(k, v); });
    add("clean.flatline_scope", "channel or electrode", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.clean.flatline_scope = parse_flatline_scope(as_string(k, v));
    });
    add("clean.session_loss_threshold", "sessions losing more are excluded",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          c.clean.session_loss_threshold = as_double(k, v);
        });
    add("clean.subject_loss_threshold", "subjects losing more are excluded",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          c.clean.subject_loss_threshold = as_double(k, v);
        });
    add("clean.fold_loss_threshold", "folds whose test parts lose more are discarded",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          c.clean.fold_loss_threshold = as_double(k, v);
        });

    add("cv.folds", "parts per task", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.cv.folds = as_count(k, v);
    });
    add("cv.invert", "train on one part, test on the rest", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.cv.invert_folds = as_bool(k, v);
    });
    add("cv.per_session", "separate fold plan per session",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.cv.per_session = as_bool(k, v); });

    add("bench.algorithms", "algorithm names or \"all\"", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      std::vector<Algorithm> out;
      for (const auto& name : as_list(k, v)) {
        if (name == "all") {
          out.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());
          continue;
        }
        const auto a = parse_algorithm(name);
        if (!a) fail(k + ": unknown algorithm " + name);
        if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
      }
      if (out.empty()) fail(k + " must name at least one algorithm");
      c.algorithms = out;
    });
    add("bench.features", "feature columns, electrodes or bands to train on, or \"all\"",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          std::vector<std::size_t> out;
          for (const auto& name : as_list(k, v)) {
            if (name == "all") {
              out.clear();
              break;
            }
            const auto sep = name.find('_');
            if (sep != std::string::npos) {
              const auto e = ChannelLayout::electrode_index(name.substr(0, sep));
              const auto b = ChannelLayout::band_index(name.substr(sep + 1));
              if (!e || !b) fail(k + ": unknown feature column " + name);
              out.push_back(ChannelLayout::feature_index(*e, *b));
            } else if (const auto e = ChannelLayout::electrode_index(name)) {
              for (std::size_t b = 0; b < kBandCount; ++b) out.push_back(ChannelLayout::feature_index(*e, b));
            } else if (const auto b = ChannelLayout::band_index(name)) {
              for (std::size_t e = 0; e < kElectrodeCount; ++e) out.push_back(ChannelLayout::feature_index(e, *b));
            } else {
              fail(k + ": unknown electrode, band or feature column " + name);
            }
          }
          std::sort(out.begin(), out.end());
          out.erase(std::unique(out.begin(), out.end()), out.end());
          if (out.size() == kFeatureCount) out.clear();
          c.features = out;
        });
    add("bench.threads", "worker threads (0 = all hardware threads)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.threads = as_count(k, v); });
    add("bench.timing", "measure fit and predict time (false reports 0)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.timing = as_bool(k, v); });

    add("model.svm_c", "SVM box constraint", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.svm_c = as_double(k, v);
    });
    add("model.svm_gamma", "RBF gamma (0 = scale)", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.svm_gamma = as_double(k, v);
    });
    add("model.svm_tol", "SMO stopping tolerance", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.svm_tol = as_double(k, v);
    });
    add("model.svm_max_iterations", "SMO iteration cap (0 = automatic)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.hyper.svm_max_iterations = as_count(k, v); });
    add("model.knn_k", "neighbours", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.knn_k = as_count(k, v);
    });
    add("model.tree_max_depth", "tree depth limit (0 = unlimited)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.hyper.tree_max_depth = as_count(k, v); });
    add("model.tree_min_split", "fewest rows a node needs to split",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.hyper.tree_min_split = as_count(k, v); });
    add("model.rf_trees", "forest size", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.rf_trees = as_count(k, v);
    });
    add("model.rf_features_per_split", "features drawn per split (0 = ceil(sqrt(d)))",
        [](RunConfig& c, const std::string& k, const TomlValue& v) {
          c.hyper.rf_features_per_split = as_count(k, v);
        });
    add("model.rf_bootstrap", "bootstrap rows per tree", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.rf_bootstrap = as_bool(k, v);
    });
    add("model.ada_stages", "AdaBoost stages", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.ada_stages = as_count(k, v);
    });
    add("model.ada_learning_rate", "AdaBoost learning rate", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.ada_learning_rate = as_double(k, v);
    });
    add("model.gb_stages", "gradient boosting stages", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.gb_stages = as_count(k, v);
    });
    add("model.gb_depth", "gradient boosting tree depth", [](RunConfig& c, const std::string& k, const TomlValue& v) {
      c.hyper.gb_depth = as_count(k, v);
    });
    add("model.gb_learning_rate", "gradient boosting learning rate",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.hyper.gb_learning_rate = as_double(k, v); });

    add("report.baseline", "JSON object of baseline accuracies for table4.csv",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.baseline = as_string(k, v); });
    add("report.benchmark", "benchmark.json to render (report stage)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.benchmark_file = as_string(k, v); });
    add("report.clean_report", "clean_report.json to render (report stage)",
        [](RunConfig& c, const std::string& k, const TomlValue& v) { c.clean_report_file = as_string(k, v); });
    return t;
  }();
  return table;
}

}  // namespace

std::string TomlValue::describe() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + v + "\"";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].describe();
          return out + "]";
        }
      },
      data);
}

TomlTable parse_toml(std::string_view text, const std::string& source) {
  return TomlParser(text, source).document();
}

TomlValue parse_toml_value(std::string_view text) {
  try {
    return TomlParser(text, "<value>").single();
  } catch (const Error&) {
    return TomlValue{std::string(trim(text))};
  }
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : key_table()) out.emplace_back(k.key, k.help);
    return out;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const TomlValue& value) {
  for (const auto& k : key_table()) {
    if (k.key == key) {
      k.set(*this, key, value);
      return;
    }
  }
  fail("unknown config key " + key);
}

void RunConfig::apply(const TomlTable& table) {
  for (const auto& [key, value] : table) set(key, value);
}

void RunConfig::load(const std::filesystem::path& path) {
  apply(parse_toml(read_text_file(path), path.string()));
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s = synth.value_or(SynthConfig{});
  s.sample_rate = sample_rate;
  s.task_duration = task_duration;
  s.seed = synth_seed.value_or(seed);
  return s;
}

void RunConfig::validate() const {
  if (!inputs.empty() && synth) fail("set either input.paths or [synth] settings, not both");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) fail("sample_rate must be positive");
  if (!(task_duration > 0.0) || !std::isfinite(task_duration)) fail("task_duration must be positive");
  if (boundaries && inputs.size() != 1) fail("input.boundaries applies to exactly one input file");
  if (boundaries && format != InputFormat::MindMonitor) fail("input.boundaries needs input.format = mind_monitor");
  if (algorithms.empty()) fail("bench.algorithms must name at least one algorithm");
  clean.validate(sample_rate);
  CvConfig cvc = cv;
  cvc.trim_fraction = clean.trim_fraction;
  cvc.fold_loss_threshold = clean.fold_loss_threshold;
  cvc.validate();
  ModelSpec spec;
  spec.hyper = hyper;
  spec.validate();
  if (synthetic()) synth_config().validate();
}

nlohmann::json RunConfig::to_json() const {
  std::vector<std::string> paths;
  for (const auto& p : inputs) paths.push_back(p.generic_string());
  std::vector<std::string> algos;
  for (const Algorithm a : algorithms) algos.emplace_back(algorithm_id(a));
  std::vector<std::string> columns;
  for (const std::size_t f : features) columns.push_back(ChannelLayout::column_name(f));
  nlohmann::json j{
      {"seed", seed},
      {"sample_rate", sample_rate},
      {"task_duration", task_duration},
      {"input",
       {{"paths", paths},
        {"format", format == InputFormat::Canonical ? "canonical" : "mind_monitor"},
        {"boundaries", boundaries ? nlohmann::json(boundaries->generic_string()) : nlohmann::json(nullptr)}}},
      {"clean",
       {{"trim_fraction", clean.trim_fraction},
        {"flatline_seconds", clean.flatline_seconds},
        {"flatline_scope", flatline_scope_name(clean.flatline_scope)},
        {"session_loss_threshold", clean.session_loss_threshold},
        {"subject_loss_threshold", clean.subject_loss_threshold},
        {"fold_loss_threshold", clean.fold_loss_threshold}}},
      {"cv", {{"folds", cv.folds}, {"invert", cv.invert_folds}, {"per_session", cv.per_session}}},
      {"bench", {{"algorithms", algos}, {"features", columns}, {"threads", threads}, {"timing", timing}}},
      {"model", hyper.to_json()},
  };
  if (synthetic()) j["synth"] = eeg4::to_json(synth_config());
  if (baseline) j["report"]["baseline"] = baseline->generic_string();
  return j;
}

}  // namespace eeg4
