#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iccscan/engine.hpp"
#include "iccscan/findings.hpp"

namespace iccscan {

/// Identifier written into the `schema` field of machine reports.
inline constexpr std::string_view kReportSchema = "iccscan.report/1";

struct CorpusSummary {
  int total_apps = 0;
  int apps_with_leaks = 0;
  int total_leaks = 0;

  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

/// Problem that concerns an app or the corpus as a whole rather than a line.
struct CorpusDiagnostic {
  std::string app_id;
  std::string message;

  friend bool operator==(const CorpusDiagnostic&,
                         const CorpusDiagnostic&) = default;
};

struct CorpusReport {
  /// Ordered by (app_id, file).
  std::vector<FileReport> per_file;
  CorpusSummary totals;
  std::vector<CorpusDiagnostic> diagnostics;

  friend bool operator==(const CorpusReport&, const CorpusReport&) = default;
};

/// Totals recomputed from per-file results. Apps are the distinct app ids
/// among analyzed files; leaks are distinct (app, file, sink line) triples.
CorpusSummary summarize(const std::vector<FileReport>& per_file);

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Human-readable report of one file: per flow a `Flow:` line listing the
/// flow's line numbers, then one line per finding.
std::string render_text(const FileReport& report);

/// Text report of a corpus scan: flows grouped by app and file, followed by
/// the three corpus totals.
std::string render_text(const CorpusReport& report);

/// JSON document described in docs/report-schema.md. Throws ReportError
/// when `report.totals` disagrees with summarize(report.per_file).
std::string render_machine(const CorpusReport& report);

/// Inverse of render_machine(). Throws ReportError on malformed input,
/// unknown schema or inconsistent totals.
CorpusReport parse_machine(std::string_view text);

/// Methods that contribute to at least one flow, reduced to their
/// signature and the statements on flow lines. Each output line starts
/// with its original line number. Empty when the file has no flows.
std::string emit_cleaned_source(const Analysis& analysis);

/// Sibling path used for cleaned output: `Foo.java` -> `Foo.flow.txt`.
std::filesystem::path cleaned_source_path(const std::filesystem::path& source);

} // namespace iccscan
