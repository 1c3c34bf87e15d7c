#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "eeg4/error.hpp"
#include "eeg4/recording_io.hpp"
#include "fixtures.hpp"

using namespace eeg4;

namespace {

std::string header_line() {
  std::string h;
  for (const auto& c : canonical_header()) h += (h.empty() ? "" : ",") + c;
  return h + "\n";
}

std::string canonical_row(const std::string& task, double t, double fill) {
  std::ostringstream os;
  os << "1,1," << task << "," << t;
  for (std::size_t f = 0; f < kFeatureCount; ++f) os << "," << fill + 0.001 * static_cast<double>(f);
  return os.str() + "\n";
}

std::string uniform_canonical(std::size_t per_task) {
  std::string text = header_line();
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    for (std::size_t i = 0; i < per_task; ++i) {
      const double t = static_cast<double>(k * per_task + i) / 10.0;
      text += canonical_row(std::string(task_name(kProtocolOrder[k])), t, 0.5 + 1e-4 * static_cast<double>(i));
    }
  }
  return text;
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

std::string mind_monitor_header(std::size_t skip_feature = kFeatureCount) {
  std::string h = "TimeStamp";
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (f == skip_feature) continue;
    std::string band(ChannelLayout::bands[ChannelLayout::band_of(f)]);
    band[0] = static_cast<char>(band[0] - 'a' + 'A');
    h += "," + band + "_" + std::string(ChannelLayout::electrodes[ChannelLayout::electrode_of(f)]);
  }
  return h + ",HSI_TP9,Elements\n";
}

}  // namespace

TEST_CASE("canonical header names electrode-major band columns") {
  const auto h = canonical_header();
  REQUIRE(h.size() == 4 + kFeatureCount);
  CHECK(h[0] == "subject");
  CHECK(h[3] == "t");
  CHECK(h[4] == "TP9_delta");
  CHECK(h[5] == "TP9_theta");
  CHECK(h[9] == "AF7_delta");
  CHECK(h[23] == "TP10_gamma");
}

TEST_CASE("3000-row canonical file gives five tasks of 600") {
  std::istringstream in(uniform_canonical(600));
  const auto parsed = parse_canonical_csv(in);
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    CHECK(parsed.session.tasks[k].task == kProtocolOrder[k]);
    CHECK(parsed.session.tasks[k].snapshots.size() == 600);
  }
  CHECK(parsed.report.rows_read == 3000);
  CHECK(parsed.report.rows_rejected == 0);
}

TEST_CASE("unknown task label is rejected") {
  std::string text = header_line() + canonical_row("Sleep", 0.0, 0.5);
  std::istringstream in(text);
  CHECK(code_of([&] { parse_canonical_csv(in); }) == ErrorCode::BadTaskLabel);
}

TEST_CASE("row with a non-finite value is dropped and counted") {
  std::string text = uniform_canonical(20);
  // Replace the last cell (TP10_gamma) of data row 7 with inf.
  std::istringstream lines(text);
  std::string out, line;
  int n = 0;
  while (std::getline(lines, line)) {
    if (n == 7) line = line.substr(0, line.rfind(',')) + ",inf";
    out += line + "\n";
    ++n;
  }
  std::istringstream in(out);
  const auto parsed = parse_canonical_csv(in, 10.0, 2.0);
  CHECK(parsed.report.rows_rejected == 1);
  REQUIRE(parsed.report.rejected_lines.size() == 1);
  CHECK(parsed.report.rejected_lines[0] == 8);
  CHECK(parsed.session.snapshot_count() == 99);
}

TEST_CASE("missing canonical column") {
  std::string text = uniform_canonical(5);
  text.replace(text.find("AF8_theta"), 9, "AF8_thetx");
  std::istringstream in(text);
  CHECK(code_of([&] { parse_canonical_csv(in, 10.0, 0.5); }) == ErrorCode::MissingColumn);
}

TEST_CASE("timestamps that go backwards within a task") {
  std::string text = header_line() + canonical_row("Think", 1.0, 0.5) + canonical_row("Think", 0.5, 0.6);
  std::istringstream in(text);
  CHECK(code_of([&] { parse_canonical_csv(in); }) == ErrorCode::NonMonotonicTimestamp);
}

TEST_CASE("task without rows") {
  std::string text = header_line();
  for (auto task : {"Think", "Count", "Breathe", "Draw"}) text += canonical_row(task, 0.0, 0.5);
  std::istringstream in(text);
  CHECK(code_of([&] { parse_canonical_csv(in); }) == ErrorCode::EmptyTask);
}

TEST_CASE("canonical write/parse/write is byte stable") {
  const Session s = fixtures::nominal_session(3, 2, 11, 50);
  std::ostringstream first;
  write_canonical_csv(s, first);
  std::istringstream in(first.str());
  const auto parsed = parse_canonical_csv(in, 10.0, 5.0);
  CHECK(parsed.session.subject_id == 3);
  CHECK(parsed.session.session_index == 2);
  std::ostringstream second;
  write_canonical_csv(parsed.session, second);
  CHECK(first.str() == second.str());
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    REQUIRE(parsed.session.tasks[k].snapshots.size() == s.tasks[k].snapshots.size());
    for (std::size_t i = 0; i < s.tasks[k].snapshots.size(); ++i)
      CHECK(parsed.session.tasks[k].snapshots[i].values == s.tasks[k].snapshots[i].values);
  }
}

TEST_CASE("format_number round-trips doubles") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<double>(i % 20) - 10.0);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.25) == "0.25");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("segment_tasks uses half-open intervals") {
  std::vector<SpectralSnapshot> rows(3);
  rows[0].timestamp = 59.9;
  rows[1].timestamp = 60.0;
  rows[2].timestamp = 301.0;
  const std::vector<double> b{0, 60, 120, 180, 240, 300};
  const auto seg = segment_tasks(rows, b);
  CHECK(seg.tasks[0].snapshots.size() == 1);
  CHECK(seg.tasks[1].snapshots.size() == 1);
  CHECK(seg.tasks[1].task == Task::Count);
  CHECK(seg.discarded == 1);
}

TEST_CASE("segment_tasks partitions uniform 10 Hz rows") {
  std::vector<SpectralSnapshot> rows(3000);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].timestamp = static_cast<double>(i) / 10.0;
  const std::vector<double> b{0, 60, 120, 180, 240, 300};
  const auto seg = segment_tasks(rows, b);
  std::size_t total = seg.discarded;
  for (const auto& t : seg.tasks) {
    CHECK(t.snapshots.size() == 600);
    total += t.snapshots.size();
  }
  CHECK(total == rows.size());
}

TEST_CASE("segment_tasks needs six boundaries") {
  std::vector<SpectralSnapshot> rows(1);
  const std::vector<double> b{0, 60, 120};
  CHECK(code_of([&] { segment_tasks(rows, b); }) == ErrorCode::BoundaryCountMismatch);
}

TEST_CASE("Mind Monitor file with markers") {
  std::string text = mind_monitor_header();
  const double t0 = 1000.0;
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    text += std::to_string(t0 + 6.0 * static_cast<double>(k) - 0.01) + std::string(kFeatureCount + 2, ',') + "/Marker/" +
            std::to_string(k + 1) + "\n";
    for (std::size_t i = 0; i < 60; ++i) {
      std::ostringstream row;
      row.precision(17);
      row << t0 + 6.0 * static_cast<double>(k) + 0.1 * static_cast<double>(i);
      // Column Alpha_AF8 (feature 2*5+2) carries the row id to check feature ordering.
      for (std::size_t f = 0; f < kFeatureCount; ++f)
        row << "," << (f == 12 ? static_cast<double>(k * 100 + i) : static_cast<double>(f) + 0.5);
      row << ",1,\n";
      text += row.str();
    }
  }
  std::istringstream in(text);
  MindMonitorOptions options;
  options.subject_id = 4;
  options.session_index = 3;
  options.task_duration = 6.0;
  const auto parsed = parse_mind_monitor_csv(in, options);
  const Session& s = parsed.session;
  CHECK(s.subject_id == 4);
  CHECK(s.session_index == 3);
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    REQUIRE(s.tasks[k].snapshots.size() == 60);
    CHECK(s.tasks[k].snapshots[5].values[12] == doctest::Approx(static_cast<double>(k * 100 + 5)));
    CHECK(s.tasks[k].snapshots[5].values[ChannelLayout::feature_index(0, 3)] == 3.5);
  }
  CHECK(s.tasks[0].snapshots[0].timestamp == doctest::Approx(0.01));
}

TEST_CASE("Mind Monitor errors") {
  MindMonitorOptions options;
  SUBCASE("missing band column") {
    std::istringstream in(mind_monitor_header(ChannelLayout::feature_index(2, 1)) + "1.0\n");
    try {
      parse_mind_monitor_csv(in, options);
      FAIL("expected MissingColumn");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingColumn);
      CHECK(std::string(e.what()).find("Theta_AF8") != std::string::npos);
    }
  }
  SUBCASE("no markers") {
    std::string text = mind_monitor_header();
    for (int i = 0; i < 10; ++i) {
      std::string r = std::to_string(i * 0.1);
      for (std::size_t f = 0; f < kFeatureCount; ++f) r += ",0.5";
      text += r + ",1,\n";
    }
    std::istringstream in(text);
    CHECK(code_of([&] { parse_mind_monitor_csv(in, options); }) == ErrorCode::NoTaskMarkers);
  }
  SUBCASE("clock steps back by more than half a second") {
    std::string text = mind_monitor_header();
    const auto row = [](double t) {
      std::string r = std::to_string(t);
      for (std::size_t f = 0; f < kFeatureCount; ++f) r += "," + std::to_string(0.5 + t);
      return r + ",1,\n";
    };
    text += row(10.0) + row(10.1) + row(9.0);
    std::istringstream in(text);
    options.boundaries = std::vector<double>{0, 1, 2, 3, 4, 5};
    CHECK(code_of([&] { parse_mind_monitor_csv(in, options); }) == ErrorCode::ClockSkew);
  }
  SUBCASE("a task interval without rows") {
    std::string text = mind_monitor_header();
    for (int i = 0; i < 50; ++i) {
      const double t = i * 0.1;
      std::string r = std::to_string(t);
      for (std::size_t f = 0; f < kFeatureCount; ++f) r += "," + std::to_string(1.0 + t);
      text += r + ",1,\n";
    }
    // Recall spans [1.95, 1.99), between two 10 Hz rows.
    options.boundaries = std::vector<double>{0, 1, 1.95, 1.99, 3, 5};
    std::istringstream in(text);
    CHECK(code_of([&] { parse_mind_monitor_csv(in, options); }) == ErrorCode::EmptyTask);
  }
}
