#include <doctest.h>

#include <random>

#include "../oracles/flatline_oracle.hpp"
#include "eeg4/cleaning.hpp"
#include "eeg4/error.hpp"
#include "fixtures.hpp"

using namespace eeg4;

namespace {

// Holds channel `c` of task `k` constant over post-trim positions [from, from + len).
void flatten(Session& s, std::size_t k, std::size_t c, std::size_t from, std::size_t len, std::size_t trim = 180) {
  auto& snaps = s.tasks[k].snapshots;
  const double v = snaps[trim + from].values[c];
  for (std::size_t i = trim + from; i < trim + from + len; ++i) snaps[i].values[c] = v;
}

// Session losing exactly `removed` of its 2100 post-trim snapshots.
Session lossy_session(int subject, int index, std::size_t removed, std::uint64_t seed) {
  Session s = fixtures::nominal_session(subject, index, seed);
  for (std::size_t k = 0; k < kTaskCount && removed > 0; ++k) {
    const std::size_t take = std::min<std::size_t>(removed, 420);
    REQUIRE((take == 420 || take >= 14));
    flatten(s, k, 3, 0, take);
    removed -= take;
  }
  return s;
}

}  // namespace

TEST_CASE("trim_count is a ceiling") {
  CHECK(trim_count(600, 0.30) == 180);
  CHECK(trim_count(10, 0.30) == 3);
  CHECK(trim_count(7, 0.30) == 3);
  CHECK(trim_count(0, 0.30) == 0);
  CHECK(trim_count(1, 0.30) == 1);
}

TEST_CASE("trim keeps order and starts at the first untrimmed snapshot") {
  const Session s = fixtures::nominal_session(1, 1, 3);
  const TaskRecord t = trim_transition(s.tasks[2], 0.30);
  REQUIRE(t.snapshots.size() == 420);
  CHECK(t.snapshots.front().timestamp == s.tasks[2].snapshots[180].timestamp);
  CHECK(t.snapshots.back().timestamp == s.tasks[2].snapshots[599].timestamp);
}

TEST_CASE("flat-line run length") {
  CHECK(flatline_run_length(1.4, 10.0) == 14);
  CHECK(flatline_run_length(1.4, 256.0) == 359);
  CHECK(flatline_run_length(0.2, 10.0) == 2);
}

TEST_CASE("14 equal samples are flagged, 13 are not") {
  Session s = fixtures::nominal_session(1, 1, 4, 100);
  auto& snaps = s.tasks[0].snapshots;
  const std::size_t alpha_tp9 = ChannelLayout::feature_index(0, 2);
  for (std::size_t i = 10; i < 24; ++i) snaps[i].values[alpha_tp9] = 0.7;
  for (std::size_t i = 50; i < 63; ++i) snaps[i].values[alpha_tp9] = 0.3;
  const auto flagged = detect_flatlines(s.tasks[0], 1.4, 10.0);
  REQUIRE(flagged.size() == 14);
  CHECK(flagged.front() == 10);
  CHECK(flagged.back() == 23);
}

TEST_CASE("jittered data has no flat lines") {
  const Session s = fixtures::nominal_session(1, 1, 5);
  for (const auto& t : s.tasks) CHECK(detect_flatlines(t, 1.4, 10.0).empty());
}

TEST_CASE("overlapping runs on two channels give the union") {
  Session s = fixtures::nominal_session(1, 1, 6, 100);
  auto& snaps = s.tasks[1].snapshots;
  for (std::size_t i = 20; i < 40; ++i) snaps[i].values[0] = 1.0;
  for (std::size_t i = 30; i < 50; ++i) snaps[i].values[19] = 2.0;
  const auto flagged = detect_flatlines(s.tasks[1], 1.4, 10.0);
  CHECK(flagged.size() == 30);
  CHECK(flagged == oracle::flatline_indices(s.tasks[1], 1.4, 10.0));
}

TEST_CASE("electrode scope needs all five bands flat") {
  Session s = fixtures::nominal_session(1, 1, 7, 100);
  auto& snaps = s.tasks[0].snapshots;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t b = 0; b < 4; ++b) snaps[i].values[ChannelLayout::feature_index(1, b)] = 1.0 + b;
  CHECK(detect_flatlines(s.tasks[0], 1.4, 10.0, FlatlineScope::Electrode).empty());
  for (std::size_t i = 0; i < 20; ++i) snaps[i].values[ChannelLayout::feature_index(1, 4)] = 9.0;
  CHECK(detect_flatlines(s.tasks[0], 1.4, 10.0, FlatlineScope::Electrode).size() == 20);
}

TEST_CASE("randomized flat-line fixtures agree with the oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    Session s = fixtures::nominal_session(1, 1, rng(), 80);
    auto& t = s.tasks[0];
    std::uniform_int_distribution<std::size_t> pos(0, 79), len(2, 20), ch(0, kFeatureCount - 1);
    const int runs = static_cast<int>(rng() % 6);
    for (int r = 0; r < runs; ++r) {
      const std::size_t c = ch(rng), a = pos(rng), l = len(rng);
      for (std::size_t i = a; i < std::min<std::size_t>(80, a + l); ++i) t.snapshots[i].values[c] = 0.25;
    }
    CHECK(detect_flatlines(t, 1.4, 10.0) == oracle::flatline_indices(t, 1.4, 10.0));
  }
}

TEST_CASE("remove_flatlines deletes flagged snapshots") {
  const Session s = fixtures::nominal_session(1, 1, 8, 20);
  const std::vector<std::size_t> flagged{0, 5, 6, 19};
  const auto r = remove_flatlines(s.tasks[0], flagged);
  CHECK(r.removed == 4);
  REQUIRE(r.task.snapshots.size() == 16);
  CHECK(r.task.snapshots[0].timestamp == s.tasks[0].snapshots[1].timestamp);
  CHECK(r.task.snapshots[4].timestamp == s.tasks[0].snapshots[7].timestamp);
}

TEST_CASE("clean report accounting") {
  Session s = lossy_session(1, 1, 500, 12);
  const auto cleaned = clean_session(s, CleanConfig{});
  std::size_t removed = 0;
  for (const auto& st : cleaned.stats) {
    CHECK(st.nominal_count == 600);
    CHECK(st.post_trim_count == 420);
    CHECK(st.retained_count + st.removed_flatline_count == st.post_trim_count);
    removed += st.removed_flatline_count;
  }
  CHECK(removed == 500);
  CHECK(cleaned.stats[0].loss_fraction() == 1.0);
  CHECK(cleaned.stats[1].loss_fraction() == doctest::Approx(80.0 / 420.0));
}

TEST_CASE("session and subject exclusion is strict") {
  CleanConfig config;
  SUBCASE("session at 0.66 is excluded") {
    const auto r = clean_corpus({lossy_session(1, 1, 1386, 1), lossy_session(1, 2, 0, 2)}, config);
    REQUIRE(r.report.sessions.size() == 2);
    CHECK(r.report.sessions[0].loss_fraction == doctest::Approx(0.66));
    CHECK(r.report.sessions[0].excluded);
    CHECK(r.report.excluded_sessions == std::vector<std::pair<int, int>>{{1, 1}});
    REQUIRE(r.retained.size() == 1);
    CHECK(r.retained[0].sessions.size() == 1);
  }
  SUBCASE("session at 0.64 is retained") {
    const auto r = clean_corpus({lossy_session(1, 1, 1344, 1)}, config);
    CHECK_FALSE(r.report.sessions[0].excluded);
    CHECK(r.retained.size() == 1);
  }
  SUBCASE("subject at exactly 0.65 is retained") {
    const auto r = clean_corpus({lossy_session(2, 1, 1365, 3)}, config);
    CHECK(r.report.subjects[0].loss_fraction == 0.65);
    CHECK_FALSE(r.report.subjects[0].excluded);
    CHECK(r.retained.size() == 1);
  }
  SUBCASE("subject above threshold overall is excluded even with usable sessions") {
    // 0.64 + 0.64 + 0.70 over three sessions: every session but one passes, subject loss 0.66.
    const auto r = clean_corpus(
        {lossy_session(3, 1, 1344, 1), lossy_session(3, 2, 1344, 2), lossy_session(3, 3, 1470, 3)}, config);
    CHECK(r.report.subjects[0].loss_fraction == doctest::Approx(0.66));
    CHECK(r.report.subjects[0].excluded);
    CHECK(r.report.excluded_subjects == std::vector<int>{3});
    CHECK(r.retained.empty());
  }
}

TEST_CASE("duplicate session is rejected") {
  const Session s = fixtures::nominal_session(1, 1, 1, 30);
  CHECK_THROWS_AS(clean_corpus({s, s}, CleanConfig{}), Error);
}

TEST_CASE("clean config validation") {
  CleanConfig c;
  c.trim_fraction = 0.0;
  CHECK_THROWS_AS(c.validate(10.0), Error);
  c = CleanConfig{};
  c.flatline_seconds = 0.1;
  CHECK_THROWS_AS(c.validate(10.0), Error);
  c = CleanConfig{};
  c.session_loss_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(10.0), Error);
  CHECK_NOTHROW(CleanConfig{}.validate(10.0));
}

TEST_CASE("clean report JSON round trip") {
  const auto r = clean_corpus({lossy_session(1, 1, 700, 1), lossy_session(2, 1, 1500, 2)}, CleanConfig{});
  const auto back = clean_report_from_json(to_json(r.report));
  CHECK(to_json(back) == to_json(r.report));
  CHECK(to_csv(back) == to_csv(r.report));
  CHECK(back.excluded_sessions == r.report.excluded_sessions);
}
