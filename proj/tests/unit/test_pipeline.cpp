#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eeg4/pipeline.hpp"
#include "text.hpp"

using namespace eeg4;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("eeg4_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig tiny(const fs::path& out) {
  RunConfig c;
  c.out_dir = out;
  c.set("synth.subjects", "2");
  c.set("synth.sessions_per_subject", "1");
  c.set("synth.separation", "3");
  c.set("bench.algorithms", "lda, decision_tree");
  c.set("bench.timing", "false");
  return c;
}

}  // namespace

TEST_CASE("ids from Mind Monitor file names") {
  CHECK(ids_from_file_name("S03_session2.csv") == std::pair{3, 2});
  CHECK(ids_from_file_name("dir9/mindMonitor_12_4_2021.csv") == std::pair{12, 4});
  CHECK_FALSE(ids_from_file_name("recording.csv").has_value());
}

TEST_CASE("synth files feed the other stages") {
  const fs::path dir = scratch("synth");
  RunConfig c = tiny(dir / "corpus");
  REQUIRE(run_stage(c, Stage::Synth).exit_code == 0);
  CHECK(fs::exists(dir / "corpus" / "manifest.json"));
  CHECK(fs::exists(dir / "corpus" / "subject2_session1.csv"));

  RunConfig from_files;
  from_files.inputs = {dir / "corpus" / "subject1_session1.csv", dir / "corpus" / "subject2_session1.csv"};
  from_files.out_dir = dir / "cv";
  const auto r = run_stage(from_files, Stage::Cv);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "cv" / "fold_plans.json"));
  CHECK(fs::exists(dir / "cv" / "clean_report.csv"));

  // The files hold the generated sessions: the clean report matches cleaning in memory.
  RunConfig in_memory = tiny(dir / "mem");
  REQUIRE(run_stage(in_memory, Stage::Clean).exit_code == 0);
  CHECK(read_text_file(dir / "mem" / "clean_report.csv") == read_text_file(dir / "cv" / "clean_report.csv"));
  fs::remove_all(dir);
}

TEST_CASE("bench then report equals run") {
  const fs::path dir = scratch("run");
  RunConfig c = tiny(dir / "all");
  REQUIRE(run_stage(c, Stage::Run).exit_code == 0);
  c.out_dir = dir / "bench";
  REQUIRE(run_stage(c, Stage::Bench).exit_code == 0);
  RunConfig r;
  r.out_dir = dir / "report";
  r.benchmark_file = dir / "bench" / "benchmark.json";
  r.clean_report_file = dir / "bench" / "clean_report.json";
  REQUIRE(run_stage(r, Stage::Report).exit_code == 0);
  for (const char* f : {"table3.txt", "table3.csv", "table4.csv", "fig7_subject1_lda.svg"})
    CHECK(read_text_file(dir / "report" / f) == read_text_file(dir / "all" / f));
  CHECK(read_text_file(dir / "bench" / "benchmark.json") == read_text_file(dir / "all" / "benchmark.json"));
  // No random_forest: the RF-ordered figures are skipped.
  CHECK_FALSE(fs::exists(dir / "all" / "fig5.svg"));
  CHECK_FALSE(fs::exists(dir / "all" / "FAILED"));
  fs::remove_all(dir);
}

TEST_CASE("failures map to exit codes and leave a sentinel") {
  const fs::path dir = scratch("fail");
  SUBCASE("invalid config") {
    RunConfig c = tiny(dir);
    c.clean.trim_fraction = 2.0;
    const auto r = run_stage(c, Stage::Run);
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(dir / "FAILED"));
  }
  SUBCASE("missing input file") {
    RunConfig c;
    c.out_dir = dir;
    c.inputs = {dir / "nope.csv"};
    const auto r = run_stage(c, Stage::Clean);
    CHECK(r.exit_code == 3);
    CHECK(fs::exists(dir / "FAILED"));
  }
  SUBCASE("every subject excluded") {
    RunConfig c = tiny(dir);
    c.set("synth.flatline_rate", "40");
    c.set("synth.flatline_min_seconds", "3");
    c.set("synth.flatline_max_seconds", "4");
    const auto r = run_stage(c, Stage::Run);
    CHECK(r.exit_code == 3);
    CHECK(r.message.find("AllSubjectsExcluded") != std::string::npos);
    CHECK(fs::exists(dir / "FAILED"));
    CHECK(fs::exists(dir / "clean_report.json"));
  }
  SUBCASE("stale sentinel is cleared by a good run") {
    fs::create_directories(dir);
    write_text_file(dir / "FAILED", "old\n");
    RunConfig c = tiny(dir);
    CHECK(run_stage(c, Stage::Clean).exit_code == 0);
    CHECK_FALSE(fs::exists(dir / "FAILED"));
  }
  fs::remove_all(dir);
}
