#include "eeg4/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "eeg4/error.hpp"
#include "eeg4/recording_io.hpp"
#include "text.hpp"

namespace eeg4 {

namespace {

std::string fixed(double v, int decimals = 2) {
  if (v == 0.0) v = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Svg {
 public:
  Svg(int width, int height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
         << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& extra = "") {
    out_ << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(w) << "\" height=\""
         << fixed(h) << "\" fill=\"" << fill << '"' << extra << "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0,
            const std::string& extra = "") {
    out_ << "<line x1=\"" << fixed(x1) << "\" y1=\"" << fixed(y1) << "\" x2=\"" << fixed(x2) << "\" y2=\""
         << fixed(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed(width) << '"' << extra << "/>\n";
  }

  void text(double x, double y, const std::string& s, int size, const std::string& anchor = "middle",
            const std::string& extra = "") {
    out_ << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" font-size=\"" << size
         << "\" text-anchor=\"" << anchor << '"' << extra << '>' << escape(s) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2.00\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out_ << (i ? " " : "") << fixed(pts[i].first) << ',' << fixed(pts[i].second);
    out_ << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << fixed(cx) << "\" cy=\"" << fixed(cy) << "\" r=\"" << fixed(r) << "\" fill=\"" << fill
         << "\"/>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

std::string hex_color(int r, int g, int b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

// White to dark blue, linear in each channel.
std::string ramp(double v) {
  const auto mix = [v](int lo, int hi) { return static_cast<int>(std::lround(lo + (hi - lo) * v)); };
  return hex_color(mix(255, 8), mix(255, 48), mix(255, 107));
}

constexpr std::array<const char*, 9> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string palette(std::size_t i) { return kPalette[i % kPalette.size()]; }

std::vector<std::string> task_labels() {
  std::vector<std::string> out;
  for (const Task t : kProtocolOrder) out.emplace_back(task_name(t));
  return out;
}

}  // namespace

std::string render_heatmap(const std::vector<std::vector<double>>& rates, const std::vector<std::string>& labels,
                           const std::string& title) {
  if (rates.size() != kTaskCount || labels.size() != kTaskCount)
    throw Error(ErrorCode::DimensionMismatch, "heatmap needs a 5x5 matrix and 5 labels");
  for (const auto& row : rates) {
    if (row.size() != kTaskCount) throw Error(ErrorCode::DimensionMismatch, "heatmap needs a 5x5 matrix");
    for (const double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::AccountingMismatch, "heatmap entries must lie in [0,1]");
    }
  }
  constexpr double cell = 80.0, left = 110.0, top = 60.0;
  const int width = 560, height = 580;
  Svg svg(width, height);
  svg.text(left + cell * 2.5, 30, title, 16);
  for (std::size_t p = 0; p < kTaskCount; ++p) {
    for (std::size_t a = 0; a < kTaskCount; ++a) {
      const double v = rates[p][a];
      const double x = left + cell * static_cast<double>(a), y = top + cell * static_cast<double>(p);
      svg.rect(x, y, cell, cell, ramp(v), " stroke=\"#ffffff\" stroke-width=\"1.00\"");
      svg.text(x + cell / 2, y + cell / 2 + 5, fixed(v), 14, "middle",
               std::string(" fill=\"") + (v > 0.5 ? "#ffffff" : "#000000") + '"');
    }
  }
  for (std::size_t i = 0; i < kTaskCount; ++i) {
    const double c = cell * static_cast<double>(i) + cell / 2;
    svg.text(left - 8, top + c + 5, labels[i], 13, "end");
    svg.text(left + c, top + cell * kTaskCount + 22, labels[i], 13);
  }
  svg.text(left + cell * 2.5, top + cell * kTaskCount + 50, "Actual task", 14);
  svg.text(24, top + cell * 2.5, "Predicted task", 14, "middle",
           " transform=\"rotate(-90 24 " + fixed(top + cell * 2.5) + ")\"");
  return svg.finish();
}

std::string render_heatmap(const RateMatrix& rates, const std::string& title) {
  std::vector<std::vector<double>> m;
  for (const auto& row : rates) m.emplace_back(row.begin(), row.end());
  return render_heatmap(m, task_labels(), title);
}

SubjectAccuracies subject_accuracies(const BenchmarkSummary& summary) {
  SubjectAccuracies out;
  out.subjects = summary.subjects;
  out.algorithms = summary.algorithms;
  for (const Algorithm a : summary.algorithms) {
    std::vector<std::optional<double>> row;
    for (const int s : summary.subjects) {
      const SubjectScore* score = summary.score(s, a);
      row.push_back(score ? std::optional<double>(score->accuracy) : std::nullopt);
    }
    out.accuracy.push_back(std::move(row));
  }
  return out;
}

std::vector<std::size_t> subject_order(const std::vector<int>& subjects,
                                       const std::vector<std::optional<double>>& rf_accuracy) {
  if (rf_accuracy.size() != subjects.size())
    throw Error(ErrorCode::DimensionMismatch, "one accuracy per subject expected");
  std::vector<std::size_t> order(subjects.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = rf_accuracy[a];
    const auto& rb = rf_accuracy[b];
    if (ra.has_value() != rb.has_value()) return ra.has_value();
    if (ra && rb && *ra != *rb) return *ra < *rb;
    return subjects[a] < subjects[b];
  });
  return order;
}

namespace {

struct Plot {
  double left = 70, top = 50, width = 600, height = 360;
  double x_of(std::size_t i, std::size_t n) const {
    return n <= 1 ? left + width / 2 : left + width * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  double y_of(double v) const { return top + height * (1.0 - v); }
};

void accuracy_axis(Svg& svg, const Plot& plot, const std::string& label) {
  svg.line(plot.left, plot.top + plot.height, plot.left + plot.width, plot.top + plot.height, "#000000");
  svg.line(plot.left, plot.top, plot.left, plot.top + plot.height, "#000000");
  for (int t = 0; t <= 10; t += 2) {
    const double v = t / 10.0, y = plot.y_of(v);
    svg.line(plot.left, y, plot.left + plot.width, y, "#dddddd");
    svg.text(plot.left - 8, y + 4, fixed(v, 1), 12, "end");
  }
  svg.text(20, plot.top + plot.height / 2, label, 14, "middle",
           " transform=\"rotate(-90 20 " + fixed(plot.top + plot.height / 2) + ")\"");
}

}  // namespace

std::string render_subject_comparison(const SubjectAccuracies& data) {
  if (data.subjects.empty() || data.algorithms.empty())
    throw Error(ErrorCode::DimensionMismatch, "need at least one subject and one algorithm");
  if (data.accuracy.size() != data.algorithms.size())
    throw Error(ErrorCode::DimensionMismatch, "one accuracy row per algorithm expected");
  const auto rf = std::find(data.algorithms.begin(), data.algorithms.end(), Algorithm::RandomForest);
  if (rf == data.algorithms.end())
    throw Error(ErrorCode::MissingAlgorithm, "subject ordering needs Random Forest accuracies");
  const auto order = subject_order(data.subjects, data.accuracy[static_cast<std::size_t>(rf - data.algorithms.begin())]);

  Plot plot;
  Svg svg(940, 480);
  svg.text(plot.left + plot.width / 2, 28, "Accuracy per subject", 16);
  accuracy_axis(svg, plot, "Accuracy");
  const std::size_t n = order.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = plot.x_of(i, n);
    svg.line(x, plot.top + plot.height, x, plot.top + plot.height + 5, "#000000");
    svg.text(x, plot.top + plot.height + 20, std::to_string(data.subjects[order[i]]), 12);
  }
  svg.text(plot.left + plot.width / 2, plot.top + plot.height + 45, "Subject (ordered by Random Forest accuracy)", 14);

  for (std::size_t a = 0; a < data.algorithms.size(); ++a) {
    const auto& row = data.accuracy[a];
    if (row.size() != data.subjects.size())
      throw Error(ErrorCode::DimensionMismatch, "one accuracy per subject expected");
    std::vector<std::pair<double, double>> pts;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = row[order[i]];
      if (!v) continue;
      pts.emplace_back(plot.x_of(i, n), plot.y_of(*v));
      sum += *v;
      ++count;
    }
    const std::string color = palette(a);
    if (pts.size() > 1) svg.polyline(pts, color);
    for (const auto& [x, y] : pts) svg.circle(x, y, 3, color);
    const double ly = plot.top + 10 + 22.0 * static_cast<double>(a);
    const double lx = plot.left + plot.width + 20;
    svg.line(lx, ly, lx + 24, ly, color, 2.0);
    const std::string mean = count ? fixed(sum / static_cast<double>(count)) : "n/a";
    svg.text(lx + 30, ly + 4, std::string(algorithm_display_name(data.algorithms[a])) + " (" + mean + ")", 12, "start");
  }
  return svg.finish();
}

std::vector<NoiseRow> noise_rows(const CleanReport& clean, const BenchmarkSummary* summary) {
  std::vector<NoiseRow> rows;
  for (const auto& s : clean.subjects) {
    if (s.post_trim_count == 0) continue;
    NoiseRow r;
    r.subject_id = s.subject_id;
    const double total = static_cast<double>(s.post_trim_count);
    r.noise = static_cast<double>(s.removed_flatline_count) / total;
    r.retained = static_cast<double>(s.retained_count) / total;
    if (summary) {
      if (const SubjectScore* score = summary->score(s.subject_id, Algorithm::RandomForest)) r.rf_accuracy = score->accuracy;
    }
    rows.push_back(r);
  }
  return rows;
}

std::string render_noise_chart(const std::vector<NoiseRow>& rows, double exclusion_threshold) {
  if (rows.empty()) throw Error(ErrorCode::DimensionMismatch, "need at least one subject");
  std::vector<int> ids;
  std::vector<std::optional<double>> rf;
  for (const auto& r : rows) {
    if (!(std::abs(r.noise + r.retained - 1.0) <= 1e-9) || r.noise < 0 || r.retained < 0)
      throw Error(ErrorCode::AccountingMismatch,
                  "subject " + std::to_string(r.subject_id) + ": noise and retained fractions do not sum to 1");
    ids.push_back(r.subject_id);
    rf.push_back(r.rf_accuracy);
  }
  const auto order = subject_order(ids, rf);

  Plot plot;
  Svg svg(940, 480);
  svg.text(plot.left + plot.width / 2, 28, "Data noise and data left per subject", 16);
  accuracy_axis(svg, plot, "Fraction of post-trim data");
  const std::size_t n = rows.size();
  const double slot = plot.width / static_cast<double>(n);
  const double bar = slot * 0.6;
  for (std::size_t i = 0; i < n; ++i) {
    const NoiseRow& r = rows[order[i]];
    const double cx = plot.left + slot * (static_cast<double>(i) + 0.5);
    const double noise_top = plot.y_of(r.noise);
    svg.rect(cx - bar / 2, noise_top, bar, plot.top + plot.height - noise_top, "#d62728");
    svg.rect(cx - bar / 2, plot.top, bar, noise_top - plot.top, "#1f77b4");
    if (r.rf_accuracy) svg.circle(cx, plot.y_of(*r.rf_accuracy), 5, "#7b3294");
    svg.text(cx, plot.top + plot.height + 20, std::to_string(r.subject_id), 12);
  }
  const double gy = plot.y_of(exclusion_threshold);
  svg.line(plot.left, gy, plot.left + plot.width, gy, "#000000", 1.5, " stroke-dasharray=\"6 4\"");
  svg.text(plot.left + plot.width + 6, gy + 4, "exclusion " + fixed(exclusion_threshold), 12, "start");
  svg.text(plot.left + plot.width / 2, plot.top + plot.height + 45, "Subject (ordered by Random Forest accuracy)", 14);

  const double lx = plot.left + plot.width + 20;
  svg.rect(lx, plot.top + 40, 14, 14, "#d62728");
  svg.text(lx + 20, plot.top + 52, "Noise", 12, "start");
  svg.rect(lx, plot.top + 62, 14, 14, "#1f77b4");
  svg.text(lx + 20, plot.top + 74, "Data left", 12, "start");
  svg.circle(lx + 7, plot.top + 91, 5, "#7b3294");
  svg.text(lx + 20, plot.top + 96, "Random Forest accuracy", 12, "start");
  return svg.finish();
}

std::vector<AlgorithmScore> table_order(const BenchmarkSummary& summary) {
  std::vector<AlgorithmScore> rows = summary.per_algorithm;
  std::stable_sort(rows.begin(), rows.end(), [](const AlgorithmScore& a, const AlgorithmScore& b) {
    if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
    if (a.mean_runtime_seconds != b.mean_runtime_seconds) return a.mean_runtime_seconds < b.mean_runtime_seconds;
    return a.algorithm < b.algorithm;
  });
  return rows;
}

std::string render_table3_text(const BenchmarkSummary& summary) {
  const auto rows = table_order(summary);
  std::size_t name_width = std::string("Algorithm").size();
  for (const auto& r : rows) name_width = std::max(name_width, algorithm_display_name(r.algorithm).size());
  std::ostringstream out;
  const auto pad = [](std::string s, std::size_t w, bool right) {
    if (s.size() >= w) return s;
    return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
  };
  out << pad("Algorithm", name_width, false) << "  " << pad("Accuracy", 8, true) << "  " << pad("Run-time (s)", 12, true)
      << '\n';
  out << std::string(name_width, '-') << "  " << std::string(8, '-') << "  " << std::string(12, '-') << '\n';
  for (const auto& r : rows) {
    out << pad(std::string(algorithm_display_name(r.algorithm)), name_width, false) << "  "
        << pad(fixed(r.mean_accuracy), 8, true) << "  " << pad(fixed(r.mean_runtime_seconds), 12, true) << '\n';
  }
  return out.str();
}

std::string render_table3_csv(const BenchmarkSummary& summary) {
  std::ostringstream out;
  out << "algorithm,mean_accuracy,mean_runtime_s\n";
  for (const auto& r : table_order(summary)) {
    out << algorithm_display_name(r.algorithm) << ',' << format_number(r.mean_accuracy) << ','
        << format_number(r.mean_runtime_seconds) << '\n';
  }
  return out.str();
}

std::map<Algorithm, double> parse_baseline(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("baseline is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "baseline must be a JSON object");
  std::map<Algorithm, double> out;
  for (const auto& [key, value] : doc.items()) {
    const auto a = parse_algorithm(key);
    if (!a) throw Error(ErrorCode::InvalidConfig, "baseline names an unknown algorithm: " + key);
    if (!value.is_number()) throw Error(ErrorCode::InvalidConfig, "baseline accuracy for " + key + " is not a number");
    out[*a] = value.get<double>();
  }
  return out;
}

std::map<Algorithm, double> read_baseline(const std::filesystem::path& path) {
  return parse_baseline(read_text_file(path));
}

std::string render_table4_csv(const BenchmarkSummary& summary, const std::map<Algorithm, double>& baseline) {
  std::ostringstream out;
  out << "algorithm,accuracy,baseline_accuracy\n";
  for (const auto& r : table_order(summary)) {
    out << algorithm_display_name(r.algorithm) << ',' << format_number(r.mean_accuracy) << ',';
    if (const auto it = baseline.find(r.algorithm); it != baseline.end()) out << format_number(it->second);
    out << '\n';
  }
  return out.str();
}

std::string heatmap_file_name(int subject_id, Algorithm algorithm) {
  return "fig7_subject" + std::to_string(subject_id) + "_" + std::string(algorithm_id(algorithm)) + ".svg";
}

}  // namespace eeg4
