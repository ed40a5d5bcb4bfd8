#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "iccscan/source.hpp"

namespace iccscan {

/// Warning message attached to statements that put sensitive data into a
/// traced variable.
inline constexpr std::string_view kSensitiveWarning =
    "Warning: Source variable contains sensitive information";

/// One source-to-sink trace, as source line numbers in trace order.
struct DataFlow {
  std::vector<int> lines;

  int source_line() const { return lines.front(); }
  int sink_line() const { return lines.back(); }

  friend bool operator==(const DataFlow&, const DataFlow&) = default;
};

enum class FindingKind { Warning, Leak };

struct Finding {
  FindingKind kind = FindingKind::Warning;
  int line = 0;
  /// Full message without the line suffix: kSensitiveWarning, or the
  /// sink's mitigation tip for leaks.
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// A flow together with the findings observed along it.
struct FlowResult {
  DataFlow flow;
  std::vector<Finding> findings;

  friend bool operator==(const FlowResult&, const FlowResult&) = default;
};

/// Analysis result for one source file.
struct FileReport {
  /// Path relative to the app directory (or as given for single files).
  std::string file;
  std::string app_id;
  /// Ordered by (source line, sink line).
  std::vector<FlowResult> flows;
  std::vector<Diagnostic> diagnostics;

  /// Distinct sink lines carrying a Leak finding, ascending.
  std::vector<int> leak_lines() const;

  friend bool operator==(const FileReport&, const FileReport&) = default;
};

} // namespace iccscan
