#include "eeg4/recording_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "eeg4/error.hpp"
#include "text.hpp"

namespace eeg4 {

namespace {

enum class Cell { Ok, Blank, NonFinite, Garbage };

Cell parse_cell(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return Cell::Blank;
  if (!parse_double(s, out)) return Cell::Garbage;
  return std::isfinite(out) ? Cell::Ok : Cell::NonFinite;
}

std::string line_ref(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

// "2021-03-04 15:22:11.123" or plain seconds.
std::optional<double> parse_timestamp(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double numeric = 0.0;
  if (parse_double(s, numeric)) return std::isfinite(numeric) ? std::optional<double>(numeric) : std::nullopt;

  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  auto take_int = [&s](int& v, char sep) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) return false;
    s.remove_prefix(static_cast<std::size_t>(p - s.data()));
    if (sep != '\0') {
      if (s.empty() || (s.front() != sep && !(sep == ' ' && s.front() == 'T'))) return false;
      s.remove_prefix(1);
    }
    return true;
  };
  if (!take_int(y, '-') || !take_int(mo, '-') || !take_int(d, ' ') || !take_int(h, ':') || !take_int(mi, ':'))
    return std::nullopt;
  if (!parse_double(s, sec)) return std::nullopt;
  using namespace std::chrono;
  const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  const double days = static_cast<double>(sys_days{date}.time_since_epoch().count());
  return days * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

std::string mind_monitor_column(std::size_t feature) {
  std::string band(ChannelLayout::bands[ChannelLayout::band_of(feature)]);
  band[0] = static_cast<char>(band[0] - 'a' + 'A');
  return band + "_" + std::string(ChannelLayout::electrodes[ChannelLayout::electrode_of(feature)]);
}

void require_nonempty_tasks(const Session& s, const std::string& source) {
  for (const auto& t : s.tasks) {
    if (t.snapshots.empty())
      throw Error(ErrorCode::EmptyTask, std::string(task_name(t.task)) + " has no rows in " + source);
  }
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::Internal, "number formatting failed");
  return std::string(buf, p);
}

std::vector<std::string> canonical_header() {
  std::vector<std::string> h{"subject", "session", "task", "t"};
  for (std::size_t f = 0; f < kFeatureCount; ++f) h.push_back(ChannelLayout::column_name(f));
  return h;
}

ParsedSession parse_canonical_csv(const std::filesystem::path& path, double sample_rate, double task_duration) {
  auto in = open_input(path);
  return parse_canonical_csv(in, sample_rate, task_duration, path.string());
}

ParsedSession parse_canonical_csv(std::istream& in, double sample_rate, double task_duration,
                                  const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::MissingColumn, "empty file " + source);
  ++line_no;
  const auto header = split_csv_line(strip_line(line));
  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw Error(ErrorCode::MissingColumn, "\"" + name + "\" in " + source);
  };
  const auto canon = canonical_header();
  std::vector<std::size_t> idx;
  for (const auto& name : canon) idx.push_back(column(name));

  ParsedSession out;
  Session& s = out.session;
  s.sample_rate = sample_rate;
  std::array<bool, kTaskCount> seen{};
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    s.tasks[k].task = kProtocolOrder[k];
    s.tasks[k].nominal_duration = task_duration;
  }
  bool have_ids = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_line(line);
    if (trim(text).empty()) continue;
    const auto cells = split_csv_line(text);
    if (cells.size() < header.size())
      throw Error(ErrorCode::MalformedRow, line_ref(source, line_no) + " has " + std::to_string(cells.size()) +
                                               " cells, expected " + std::to_string(header.size()));
    ++out.report.rows_read;

    int subject = 0, session = 0;
    if (!parse_int(trim(cells[idx[0]]), subject) || !parse_int(trim(cells[idx[1]]), session))
      throw Error(ErrorCode::MalformedRow, line_ref(source, line_no) + " has a non-integer subject/session");
    if (!have_ids) {
      s.subject_id = subject;
      s.session_index = session;
      have_ids = true;
    } else if (subject != s.subject_id || session != s.session_index) {
      throw Error(ErrorCode::MalformedRow, line_ref(source, line_no) + " belongs to a different subject/session");
    }
    const auto label = trim(cells[idx[2]]);
    const auto task = parse_task(label);
    if (!task)
      throw Error(ErrorCode::BadTaskLabel,
                  line_ref(source, line_no) + " column task: \"" + std::string(label) + "\"");
    TaskRecord& rec = s.tasks[task_label(*task)];

    SpectralSnapshot snap;
    bool reject = false;
    for (std::size_t c = 3; c < idx.size(); ++c) {
      double v = 0.0;
      switch (parse_cell(cells[idx[c]], v)) {
        case Cell::Ok: break;
        case Cell::Blank:
        case Cell::NonFinite: reject = true; break;
        case Cell::Garbage:
          throw Error(ErrorCode::MalformedRow, line_ref(source, line_no) + " column " + canon[c] + ": \"" +
                                                   std::string(trim(cells[idx[c]])) + "\"");
      }
      if (c == 3) {
        snap.timestamp = v;
        if (!reject && !seen[task_label(*task)]) {
          rec.start = v;
          seen[task_label(*task)] = true;
        }
      } else {
        snap.values[c - 4] = v;
      }
    }
    if (reject) {
      ++out.report.rows_rejected;
      out.report.rejected_lines.push_back(line_no);
      continue;
    }
    if (!rec.snapshots.empty() && !(snap.timestamp > rec.snapshots.back().timestamp))
      throw Error(ErrorCode::NonMonotonicTimestamp,
                  line_ref(source, line_no) + " column t: " + format_number(snap.timestamp) + " in task " +
                      std::string(task_name(*task)));
    rec.snapshots.push_back(snap);
  }
  require_nonempty_tasks(s, source);
  validate_session(s);
  return out;
}

void write_canonical_csv(const Session& session, std::ostream& out) {
  const auto header = canonical_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string row;
  for (const auto& task : session.tasks) {
    for (const auto& snap : task.snapshots) {
      row.clear();
      row += std::to_string(session.subject_id);
      row += ',';
      row += std::to_string(session.session_index);
      row += ',';
      row += task_name(task.task);
      row += ',';
      row += format_number(snap.timestamp);
      for (double v : snap.values) {
        row += ',';
        row += format_number(v);
      }
      row += '\n';
      out << row;
    }
  }
}

void write_canonical_csv(const Session& session, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_canonical_csv(session, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<double> read_boundaries_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BoundaryCountMismatch, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::BoundaryCountMismatch, path.string() + " is not a JSON array");
  std::vector<double> out;
  for (const auto& v : doc) {
    if (!v.is_number()) throw Error(ErrorCode::BoundaryCountMismatch, path.string() + " holds a non-number");
    out.push_back(v.get<double>());
  }
  if (out.size() != kTaskCount + 1)
    throw Error(ErrorCode::BoundaryCountMismatch,
                path.string() + " holds " + std::to_string(out.size()) + " boundaries, expected 6");
  return out;
}

Segmentation segment_tasks(std::span<const SpectralSnapshot> rows, std::span<const double> boundaries) {
  if (boundaries.size() != kTaskCount + 1)
    throw Error(ErrorCode::BoundaryCountMismatch,
                "got " + std::to_string(boundaries.size()) + " boundaries, expected 6");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i] > boundaries[i - 1]) || !std::isfinite(boundaries[i]))
      throw Error(ErrorCode::BoundaryCountMismatch, "boundaries must be finite and strictly increasing");
  }
  Segmentation seg;
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    seg.tasks[k].task = kProtocolOrder[k];
    seg.tasks[k].start = boundaries[k];
    seg.tasks[k].nominal_duration = boundaries[k + 1] - boundaries[k];
  }
  for (const auto& row : rows) {
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), row.timestamp);
    if (it == boundaries.begin() || it == boundaries.end()) {
      ++seg.discarded;
      continue;
    }
    seg.tasks[static_cast<std::size_t>(it - boundaries.begin()) - 1].snapshots.push_back(row);
  }
  return seg;
}

ParsedSession parse_mind_monitor_csv(const std::filesystem::path& path, const MindMonitorOptions& options) {
  auto in = open_input(path);
  return parse_mind_monitor_csv(in, options, path.string());
}

ParsedSession parse_mind_monitor_csv(std::istream& in, const MindMonitorOptions& options,
                                     const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::MissingColumn, "empty file " + source);
  ++line_no;
  const auto header = split_csv_line(strip_line(line));
  const auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (iequals(trim(header[i]), name)) return i;
    }
    return std::nullopt;
  };
  const auto ts_col = find("TimeStamp");
  if (!ts_col) throw Error(ErrorCode::MissingColumn, "\"TimeStamp\" in " + source);
  std::array<std::size_t, kFeatureCount> feature_col{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto name = mind_monitor_column(f);
    const auto c = find(name);
    if (!c) throw Error(ErrorCode::MissingColumn, "\"" + name + "\" in " + source);
    feature_col[f] = *c;
  }
  const auto elements_col = find("Elements");
  if (!options.boundaries && !elements_col)
    throw Error(ErrorCode::NoTaskMarkers, source + " has no Elements column and no boundaries file was given");

  ParsedSession out;
  std::vector<SpectralSnapshot> rows;
  std::vector<double> markers;
  std::optional<double> origin;
  double last_t = -std::numeric_limits<double>::infinity();

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_line(line);
    if (trim(text).empty()) continue;
    const auto cells = split_csv_line(text);
    const auto cell = [&cells](std::size_t c) { return c < cells.size() ? cells[c] : std::string_view{}; };
    const auto t_abs = parse_timestamp(cell(*ts_col));
    if (!t_abs) throw Error(ErrorCode::MalformedRow, line_ref(source, line_no) + " column TimeStamp");
    if (!origin) origin = *t_abs;
    const double t = *t_abs - *origin;

    const bool is_marker = elements_col && contains_icase(cell(*elements_col), "marker");
    if (is_marker) markers.push_back(t);

    SpectralSnapshot snap;
    snap.timestamp = t;
    bool all_blank = true, reject = false;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      double v = 0.0;
      switch (parse_cell(cell(feature_col[f]), v)) {
        case Cell::Ok: all_blank = false; break;
        case Cell::Blank: reject = true; break;
        case Cell::NonFinite:
          all_blank = false;
          reject = true;
          break;
        case Cell::Garbage:
          throw Error(ErrorCode::MalformedRow,
                      line_ref(source, line_no) + " column " + mind_monitor_column(f));
      }
      snap.values[f] = v;
    }
    // Element-only rows (markers, blinks) carry no band powers.
    if (all_blank && elements_col && !trim(cell(*elements_col)).empty()) continue;
    ++out.report.rows_read;
    if (reject) {
      ++out.report.rows_rejected;
      out.report.rejected_lines.push_back(line_no);
      continue;
    }
    if (t < last_t - 0.5)
      throw Error(ErrorCode::ClockSkew, line_ref(source, line_no) + " steps back " + format_number(last_t - t) + " s");
    if (!(t > last_t)) {
      ++out.report.rows_out_of_order;
      continue;
    }
    last_t = t;
    rows.push_back(snap);
  }

  std::vector<double> boundaries;
  if (options.boundaries) {
    boundaries = *options.boundaries;
  } else {
    if (markers.size() == kTaskCount) {
      boundaries = markers;
      boundaries.push_back(markers.back() + options.task_duration);
    } else if (markers.size() == kTaskCount + 1) {
      boundaries = markers;
    } else {
      throw Error(ErrorCode::NoTaskMarkers,
                  source + " has " + std::to_string(markers.size()) + " marker rows, expected 5 or 6");
    }
  }
  auto seg = segment_tasks(rows, boundaries);
  out.report.rows_discarded = seg.discarded;
  Session& s = out.session;
  s.subject_id = options.subject_id;
  s.session_index = options.session_index;
  s.sample_rate = options.sample_rate;
  s.tasks = std::move(seg.tasks);
  require_nonempty_tasks(s, source);
  validate_session(s);
  return out;
}

}  // namespace eeg4
