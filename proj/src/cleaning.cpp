#include "eeg4/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "eeg4/error.hpp"
#include "eeg4/recording_io.hpp"
#include "text.hpp"

namespace eeg4 {

namespace {

// Absorbs representation error in products like 0.3 * 10 before ceil().
constexpr double kCeilSlack = 1e-9;

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

double loss_of(std::size_t removed, std::size_t post_trim) {
  return post_trim == 0 ? 1.0 : static_cast<double>(removed) / static_cast<double>(post_trim);
}

void add_task(UnitLoss& u, const TaskCleanStats& t) {
  u.nominal_count += t.nominal_count;
  u.post_trim_count += t.post_trim_count;
  u.removed_flatline_count += t.removed_flatline_count;
  u.retained_count += t.retained_count;
}

}  // namespace

std::string_view flatline_scope_name(FlatlineScope scope) {
  return scope == FlatlineScope::Channel ? "channel" : "electrode";
}

FlatlineScope parse_flatline_scope(std::string_view name) {
  if (iequals(name, "channel")) return FlatlineScope::Channel;
  if (iequals(name, "electrode")) return FlatlineScope::Electrode;
  throw Error(ErrorCode::InvalidConfig, "flatline scope must be channel or electrode, got " + std::string(name));
}

void CleanConfig::validate(double sample_rate) const {
  const std::pair<const char*, double> fractions[] = {
      {"trim_fraction", trim_fraction},
      {"session_loss_threshold", session_loss_threshold},
      {"subject_loss_threshold", subject_loss_threshold},
      {"fold_loss_threshold", fold_loss_threshold},
  };
  for (const auto& [name, v] : fractions) {
    if (!in_open_unit(v))
      throw Error(ErrorCode::InvalidConfig, std::string(name) + " must lie in (0,1), got " + format_number(v));
  }
  if (!(flatline_seconds > 0.0) || flatline_run_length(flatline_seconds, sample_rate) < 2)
    throw Error(ErrorCode::InvalidConfig, "flatline window must span at least 2 samples");
}

std::size_t trim_count(std::size_t n, double trim_fraction) {
  const double raw = std::ceil(trim_fraction * static_cast<double>(n) - kCeilSlack);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, raw)));
}

std::size_t flatline_run_length(double flatline_seconds, double sample_rate) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(flatline_seconds * sample_rate - kCeilSlack)));
}

TaskRecord trim_transition(const TaskRecord& task, double trim_fraction) {
  TaskRecord out;
  out.task = task.task;
  out.start = task.start;
  out.nominal_duration = task.nominal_duration;
  const auto drop = trim_count(task.snapshots.size(), trim_fraction);
  out.snapshots.assign(task.snapshots.begin() + static_cast<std::ptrdiff_t>(drop), task.snapshots.end());
  return out;
}

std::vector<std::size_t> detect_flatlines(const TaskRecord& task, double flatline_seconds, double sample_rate,
                                          FlatlineScope scope) {
  const auto min_run = flatline_run_length(flatline_seconds, sample_rate);
  const auto& s = task.snapshots;
  const std::size_t n = s.size();
  std::vector<char> flagged(n, 0);

  const std::size_t units = scope == FlatlineScope::Channel ? kFeatureCount : kElectrodeCount;
  const auto same = [&](std::size_t unit, std::size_t a, std::size_t b) {
    if (scope == FlatlineScope::Channel) return s[a].values[unit] == s[b].values[unit];
    for (std::size_t band = 0; band < kBandCount; ++band) {
      const auto f = ChannelLayout::feature_index(unit, band);
      if (s[a].values[f] != s[b].values[f]) return false;
    }
    return true;
  };

  for (std::size_t unit = 0; unit < units; ++unit) {
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i < n && same(unit, i, i - 1)) continue;
      if (i - run_start >= min_run) std::fill(flagged.begin() + run_start, flagged.begin() + i, 1);
      run_start = i;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (flagged[i]) out.push_back(i);
  }
  return out;
}

FlatlineRemoval remove_flatlines(const TaskRecord& task, std::span<const std::size_t> flagged) {
  FlatlineRemoval out;
  out.task.task = task.task;
  out.task.start = task.start;
  out.task.nominal_duration = task.nominal_duration;
  out.task.snapshots.reserve(task.snapshots.size() - std::min(task.snapshots.size(), flagged.size()));
  std::size_t next = 0;
  for (std::size_t i = 0; i < task.snapshots.size(); ++i) {
    if (next < flagged.size() && flagged[next] == i) {
      ++next;
      continue;
    }
    out.task.snapshots.push_back(task.snapshots[i]);
  }
  if (next != flagged.size())
    throw Error(ErrorCode::Internal, "flagged indices must be sorted, unique and within the task");
  out.removed = flagged.size();
  return out;
}

double TaskCleanStats::loss_fraction() const { return loss_of(removed_flatline_count, post_trim_count); }

const UnitLoss* CleanReport::subject(int subject_id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == subject_id) return &s;
  }
  return nullptr;
}

CleanedSession clean_session(const Session& session, const CleanConfig& config) {
  CleanedSession out;
  out.session.subject_id = session.subject_id;
  out.session.session_index = session.session_index;
  out.session.sample_rate = session.sample_rate;
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    const TaskRecord& raw = session.tasks[k];
    // Detection runs on the trimmed task: a flat run straddling the trim boundary is judged
    // only by its post-trim part.
    TaskRecord trimmed = trim_transition(raw, config.trim_fraction);
    const auto flagged =
        detect_flatlines(trimmed, config.flatline_seconds, session.sample_rate, config.flatline_scope);
    auto removal = remove_flatlines(trimmed, flagged);

    TaskCleanStats& st = out.stats[k];
    st.subject_id = session.subject_id;
    st.session_index = session.session_index;
    st.task = raw.task;
    st.nominal_count = static_cast<std::size_t>(std::llround(raw.nominal_duration * session.sample_rate));
    st.post_trim_count = trimmed.snapshots.size();
    st.removed_flatline_count = removal.removed;
    st.retained_count = removal.task.snapshots.size();
    out.session.tasks[k] = std::move(removal.task);
  }
  return out;
}

std::vector<SubjectData> apply_exclusions(std::vector<CleanedSession> cleaned, const CleanConfig& config,
                                          CleanReport& report) {
  std::sort(cleaned.begin(), cleaned.end(), [](const CleanedSession& a, const CleanedSession& b) {
    return std::pair(a.session.subject_id, a.session.session_index) <
           std::pair(b.session.subject_id, b.session.session_index);
  });
  for (std::size_t i = 1; i < cleaned.size(); ++i) {
    if (cleaned[i].session.subject_id == cleaned[i - 1].session.subject_id &&
        cleaned[i].session.session_index == cleaned[i - 1].session.session_index)
      throw Error(ErrorCode::MalformedRow, "duplicate recording for subject " +
                                               std::to_string(cleaned[i].session.subject_id) + " session " +
                                               std::to_string(cleaned[i].session.session_index));
  }

  report.tasks.clear();
  report.sessions.clear();
  report.subjects.clear();
  report.excluded_sessions.clear();
  report.excluded_subjects.clear();

  std::vector<SubjectData> retained;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    const int subject = cleaned[i].session.subject_id;
    UnitLoss subject_loss;
    subject_loss.subject_id = subject;
    SubjectData data;
    data.subject_id = subject;
    for (; i < cleaned.size() && cleaned[i].session.subject_id == subject; ++i) {
      UnitLoss session_loss;
      session_loss.subject_id = subject;
      session_loss.session_index = cleaned[i].session.session_index;
      for (const auto& st : cleaned[i].stats) {
        report.tasks.push_back(st);
        add_task(session_loss, st);
        add_task(subject_loss, st);
      }
      session_loss.loss_fraction = loss_of(session_loss.removed_flatline_count, session_loss.post_trim_count);
      session_loss.excluded = session_loss.loss_fraction > config.session_loss_threshold;
      if (session_loss.excluded) {
        report.excluded_sessions.emplace_back(subject, session_loss.session_index);
      } else {
        data.sessions.push_back(std::move(cleaned[i].session));
      }
      report.sessions.push_back(session_loss);
    }
    subject_loss.loss_fraction = loss_of(subject_loss.removed_flatline_count, subject_loss.post_trim_count);
    // A subject with every session excluded has nothing left to evaluate.
    subject_loss.excluded = subject_loss.loss_fraction > config.subject_loss_threshold || data.sessions.empty();
    if (subject_loss.excluded) {
      report.excluded_subjects.push_back(subject);
    } else {
      retained.push_back(std::move(data));
    }
    report.subjects.push_back(subject_loss);
  }
  return retained;
}

CleanResult clean_corpus(const std::vector<Session>& sessions, const CleanConfig& config) {
  std::vector<CleanedSession> cleaned;
  cleaned.reserve(sessions.size());
  for (const auto& s : sessions) {
    config.validate(s.sample_rate);
    cleaned.push_back(clean_session(s, config));
  }
  CleanResult out;
  out.retained = apply_exclusions(std::move(cleaned), config, out.report);
  return out;
}

namespace {

nlohmann::json unit_json(const UnitLoss& u) {
  nlohmann::json j{{"subject", u.subject_id},
                   {"nominal_count", u.nominal_count},
                   {"post_trim_count", u.post_trim_count},
                   {"removed_flatline_count", u.removed_flatline_count},
                   {"retained_count", u.retained_count},
                   {"loss_fraction", u.loss_fraction},
                   {"excluded", u.excluded}};
  if (u.session_index > 0) j["session"] = u.session_index;
  return j;
}

UnitLoss unit_from_json(const nlohmann::json& j) {
  UnitLoss u;
  u.subject_id = j.at("subject").get<int>();
  u.session_index = j.value("session", 0);
  u.nominal_count = j.at("nominal_count").get<std::size_t>();
  u.post_trim_count = j.at("post_trim_count").get<std::size_t>();
  u.removed_flatline_count = j.at("removed_flatline_count").get<std::size_t>();
  u.retained_count = j.at("retained_count").get<std::size_t>();
  u.loss_fraction = j.at("loss_fraction").get<double>();
  u.excluded = j.at("excluded").get<bool>();
  return u;
}

}  // namespace

nlohmann::json to_json(const CleanReport& report) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : report.tasks) {
    tasks.push_back({{"subject", t.subject_id},
                     {"session", t.session_index},
                     {"task", task_name(t.task)},
                     {"nominal_count", t.nominal_count},
                     {"post_trim_count", t.post_trim_count},
                     {"removed_flatline_count", t.removed_flatline_count},
                     {"retained_count", t.retained_count},
                     {"loss_fraction", t.loss_fraction()}});
  }
  nlohmann::json sessions = nlohmann::json::array();
  for (const auto& s : report.sessions) sessions.push_back(unit_json(s));
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : report.subjects) subjects.push_back(unit_json(s));
  nlohmann::json excluded_sessions = nlohmann::json::array();
  for (const auto& [subj, sess] : report.excluded_sessions)
    excluded_sessions.push_back({{"subject", subj}, {"session", sess}});
  return {{"tasks", tasks},
          {"sessions", sessions},
          {"subjects", subjects},
          {"excluded_sessions", excluded_sessions},
          {"excluded_subjects", report.excluded_subjects}};
}

CleanReport clean_report_from_json(const nlohmann::json& doc) {
  CleanReport r;
  for (const auto& t : doc.at("tasks")) {
    TaskCleanStats st;
    st.subject_id = t.at("subject").get<int>();
    st.session_index = t.at("session").get<int>();
    const auto task = parse_task(t.at("task").get<std::string>());
    if (!task) throw Error(ErrorCode::BadTaskLabel, "clean report task " + t.at("task").dump());
    st.task = *task;
    st.nominal_count = t.at("nominal_count").get<std::size_t>();
    st.post_trim_count = t.at("post_trim_count").get<std::size_t>();
    st.removed_flatline_count = t.at("removed_flatline_count").get<std::size_t>();
    st.retained_count = t.at("retained_count").get<std::size_t>();
    r.tasks.push_back(st);
  }
  for (const auto& s : doc.at("sessions")) r.sessions.push_back(unit_from_json(s));
  for (const auto& s : doc.at("subjects")) r.subjects.push_back(unit_from_json(s));
  for (const auto& e : doc.at("excluded_sessions"))
    r.excluded_sessions.emplace_back(e.at("subject").get<int>(), e.at("session").get<int>());
  r.excluded_subjects = doc.at("excluded_subjects").get<std::vector<int>>();
  return r;
}

std::string to_csv(const CleanReport& report) {
  std::ostringstream out;
  out << "subject,session,task,nominal_count,post_trim_count,removed_flatline_count,retained_count,"
         "loss_fraction,session_excluded,subject_excluded\n";
  const auto session_excluded = [&](int subj, int sess) {
    return std::find(report.excluded_sessions.begin(), report.excluded_sessions.end(), std::pair(subj, sess)) !=
           report.excluded_sessions.end();
  };
  const auto subject_excluded = [&](int subj) {
    return std::find(report.excluded_subjects.begin(), report.excluded_subjects.end(), subj) !=
           report.excluded_subjects.end();
  };
  for (const auto& t : report.tasks) {
    out << t.subject_id << ',' << t.session_index << ',' << task_name(t.task) << ',' << t.nominal_count << ','
        << t.post_trim_count << ',' << t.removed_flatline_count << ',' << t.retained_count << ','
        << format_number(t.loss_fraction()) << ',' << (session_excluded(t.subject_id, t.session_index) ? 1 : 0)
        << ',' << (subject_excluded(t.subject_id) ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace eeg4
