#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <tuple>

#include "iccscan/config.hpp"
#include "iccscan/report.hpp"

namespace iccscan {

struct ScanOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned jobs = 0;
  /// External decompiler used for app packages found at the corpus root.
  /// Invoked as `<decompiler> -d <output-dir> <package>`.
  std::optional<std::filesystem::path> decompiler;
  /// Write `<Name>.flow.txt` next to every source file that has flows.
  bool emit_cleaned = false;
};

/// File extensions treated as app packages rather than source trees.
bool is_app_package(const std::filesystem::path& path);

/// Scans every `.java` file below each immediate subdirectory of `root`
/// (one subdirectory per app). Unreadable files and failed decompiler runs
/// become diagnostics. Throws std::invalid_argument when `root` is not a
/// directory.
CorpusReport scan_corpus(const std::filesystem::path& root,
                         const TaintConfig& config,
                         const ScanOptions& options = {});

/// Leak identity used when comparing reports of different runs or tools.
struct LeakKey {
  std::string app_id;
  std::string file;
  int sink_line = 0;

  friend auto operator<=>(const LeakKey&, const LeakKey&) = default;
};

std::set<LeakKey> leak_keys(const CorpusReport& report);

struct OverlapReport {
  std::set<LeakKey> only_a;
  std::set<LeakKey> only_b;
  std::set<LeakKey> both;
};

OverlapReport compare_reports(const CorpusReport& a, const CorpusReport& b);

} // namespace iccscan
