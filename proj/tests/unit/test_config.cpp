#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eeg4/config.hpp"
#include "eeg4/error.hpp"

using namespace eeg4;

namespace {

const TomlValue& find(const TomlTable& t, const std::string& key) {
  for (const auto& [k, v] : t)
    if (k == key) return v;
  FAIL("missing key " << key);
  static TomlValue none;
  return none;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("TOML subset") {
  const auto t = parse_toml(R"(
# comment
seed = 7
name = "a \"quoted\" \u00e9 string"  # trailing comment
path = 'C:\raw\dir'
[synth]
separation = 3.0
label_shuffle = true
big = 1_000
neg = -2.5e-1
[bench]
algorithms = [
  "rf",   # first
  'lda',
]
nested = [[1, 2], [3]]
"odd key" = inf
[a.b]
c.d = false
)");
  CHECK(std::get<std::int64_t>(find(t, "seed").data) == 7);
  CHECK(std::get<std::string>(find(t, "name").data) == "a \"quoted\" \xc3\xa9 string");
  CHECK(std::get<std::string>(find(t, "path").data) == "C:\\raw\\dir");
  CHECK(std::get<double>(find(t, "synth.separation").data) == 3.0);
  CHECK(std::get<bool>(find(t, "synth.label_shuffle").data));
  CHECK(std::get<std::int64_t>(find(t, "synth.big").data) == 1000);
  CHECK(std::get<double>(find(t, "synth.neg").data) == -0.25);
  const auto& algos = std::get<TomlValue::Array>(find(t, "bench.algorithms").data);
  REQUIRE(algos.size() == 2);
  CHECK(std::get<std::string>(algos[1].data) == "lda");
  CHECK(std::get<TomlValue::Array>(find(t, "bench.nested").data).size() == 2);
  CHECK(std::isinf(std::get<double>(find(t, "bench.odd key").data)));
  CHECK_FALSE(std::get<bool>(find(t, "a.b.c.d").data));
}

TEST_CASE("TOML errors") {
  CHECK(code_of([] { parse_toml("x = "); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_toml("x = \"open"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_toml("x = {a = 1}"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_toml("x = 1\nx = 2"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_toml("[t\nx = 1"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_toml("x = [1, 2"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("bare values on the command line") {
  CHECK(std::get<std::int64_t>(parse_toml_value("12").data) == 12);
  CHECK(std::get<bool>(parse_toml_value("false").data) == false);
  CHECK(std::get<std::string>(parse_toml_value("random_forest").data) == "random_forest");
  CHECK(std::get<std::string>(parse_toml_value("out/dir").data) == "out/dir");
}

TEST_CASE("run config keys") {
  RunConfig c;
  c.set("synth.subjects", "4");
  c.set("synth.separation", "3");
  c.set("bench.algorithms", "rf, lda");
  c.set("model.rf_trees", "20");
  c.set("clean.flatline_scope", "electrode");
  c.set("cv.folds", "5");
  c.set("bench.timing", "false");
  CHECK(c.synth_config().subjects == 4);
  CHECK(c.synth_config().separation == 3.0);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::RandomForest, Algorithm::Lda});
  CHECK(c.hyper.rf_trees == 20);
  CHECK(c.clean.flatline_scope == FlatlineScope::Electrode);
  CHECK(c.cv.folds == 5);
  CHECK_FALSE(c.timing);
  c.set("bench.algorithms", "all");
  CHECK(c.algorithms.size() == 9);
  CHECK(code_of([&] { c.set("synth.nonsense", "1"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { c.set("cv.folds", "seven"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { c.set("bench.algorithms", "rf, perceptron"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { c.set("synth.subjects", "-1"); }) == ErrorCode::InvalidConfig);
  for (const auto& [key, help] : config_keys()) CHECK_FALSE(help.empty());
}

TEST_CASE("file then overrides") {
  const auto path = std::filesystem::temp_directory_path() / "eeg4_config_test.toml";
  {
    std::ofstream f(path);
    f << "seed = 5\n[synth]\nsubjects = 3\nseparation = 2.0\n[model]\nknn_k = 7\n";
  }
  RunConfig c;
  c.load(path);
  c.set("synth.subjects", "6");
  CHECK(c.seed == 5);
  CHECK(c.synth_config().subjects == 6);
  CHECK(c.synth_config().separation == 2.0);
  CHECK(c.hyper.knn_k == 7);
  CHECK(c.synth_config().seed == 5);
  c.set("synth.seed", "9");
  CHECK(c.synth_config().seed == 9);
  std::filesystem::remove(path);
  CHECK(code_of([&] { c.load(path); }) == ErrorCode::Io);
}

TEST_CASE("cross-field validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.inputs = {"a.csv"};
  c.set("synth.subjects", "3");
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  RunConfig d;
  d.inputs = {"a.csv", "b.csv"};
  d.set("input.format", "mind_monitor");
  d.set("input.boundaries", "b.json");
  CHECK(code_of([&] { d.validate(); }) == ErrorCode::InvalidConfig);
  RunConfig e;
  e.set("clean.trim_fraction", "1.5");
  CHECK(code_of([&] { e.validate(); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("config JSON leaves out the output directory") {
  RunConfig a, b;
  a.out_dir = "x";
  b.out_dir = "y";
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json().contains("seed"));
}

TEST_CASE("feature selection by column, electrode or band") {
  RunConfig c;
  c.set("bench.features", "[\"AF7\", \"alpha\", \"TP9_delta\"]");
  CHECK(c.features == std::vector<std::size_t>{0, 2, 5, 6, 7, 8, 9, 12, 17});
  CHECK(c.to_json()["bench"]["features"][0] == "TP9_delta");
  c.set("bench.features", "all");
  CHECK(c.features.empty());
  c.set("bench.features", "[\"delta\", \"theta\", \"alpha\", \"beta\", \"gamma\"]");
  CHECK(c.features.empty());
  CHECK_THROWS_AS(c.set("bench.features", "[\"Fz\"]"), Error);
  CHECK_THROWS_AS(c.set("bench.features", "[\"AF7_mu\"]"), Error);
}
