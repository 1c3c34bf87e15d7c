#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eeg4/types.hpp"

namespace eeg4 {

/// Row accounting for one parsed file.
struct ParseReport {
  std::size_t rows_read = 0;          // data rows seen (header and marker-only rows excluded)
  std::size_t rows_rejected = 0;      // dropped for blank or non-finite cells
  std::size_t rows_out_of_order = 0;  // dropped for small (<= 0.5 s) backwards clock jitter
  std::size_t rows_discarded = 0;     // outside every task interval
  std::vector<std::size_t> rejected_lines;  // 1-based file line numbers of rejected rows
};

struct ParsedSession {
  Session session;
  ParseReport report;
};

// Canonical session CSV: subject,session,task,t,TP9_delta,...,TP10_gamma
std::vector<std::string> canonical_header();

ParsedSession parse_canonical_csv(const std::filesystem::path& path, double sample_rate = 10.0,
                                  double task_duration = 60.0);
ParsedSession parse_canonical_csv(std::istream& in, double sample_rate = 10.0, double task_duration = 60.0,
                                  const std::string& source = "<stream>");

void write_canonical_csv(const Session& session, std::ostream& out);
void write_canonical_csv(const Session& session, const std::filesystem::path& path);

struct MindMonitorOptions {
  int subject_id = 1;
  int session_index = 1;
  double sample_rate = 10.0;
  double task_duration = 60.0;
  // Six task boundaries in seconds from session start; when absent, "/Marker" rows in the
  // Elements column supply them.
  std::optional<std::vector<double>> boundaries;
};

ParsedSession parse_mind_monitor_csv(const std::filesystem::path& path, const MindMonitorOptions& options);
ParsedSession parse_mind_monitor_csv(std::istream& in, const MindMonitorOptions& options,
                                     const std::string& source = "<stream>");

/// Reads a sidecar boundaries file: a JSON array of 6 numbers.
std::vector<double> read_boundaries_json(const std::filesystem::path& path);

struct Segmentation {
  std::array<TaskRecord, kTaskCount> tasks;
  std::size_t discarded = 0;
};

/// Assigns each row to the half-open interval [b[i], b[i+1]) that contains it.
Segmentation segment_tasks(std::span<const SpectralSnapshot> rows, std::span<const double> boundaries);

// Shortest round-trip decimal representation used by every writer in the project.
std::string format_number(double value);

}  // namespace eeg4
