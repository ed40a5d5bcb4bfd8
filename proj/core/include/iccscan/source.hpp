#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace iccscan {

/// A message attached to a source line. Line 0 means "whole file".
struct Diagnostic {
  int line = 0;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// One decompiled source file as read from a corpus.
struct SourceFile {
  std::filesystem::path path;
  /// Corpus identifier of the owning app (its top-level directory name).
  std::string app_id;
  std::string text;
};

/// Reads `path` into a SourceFile. Throws std::runtime_error when the file
/// cannot be opened or read.
SourceFile load_source(const std::filesystem::path& path, std::string app_id);

/// Returns `text` with every invalid UTF-8 sequence replaced by U+FFFD.
/// One diagnostic is appended per line that needed a replacement. Newlines
/// are never touched, so line numbering is preserved.
std::string sanitize_utf8(std::string_view text,
                          std::vector<Diagnostic>& diagnostics);

} // namespace iccscan
