#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "iccscan/ast.hpp"
#include "iccscan/config.hpp"
#include "iccscan/findings.hpp"

namespace iccscan::testing {

std::filesystem::path fixture_path(std::string_view relative);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Parses in-memory Java text as file `name`.
ParsedFile parse_text(std::string_view text, std::string name = "Fixture.java");

/// Runs the engine on in-memory Java text with the given config.
FileReport analyze_text(std::string_view text,
                        const TaintConfig& config = default_config());

/// (source line, sink line) of every flow in a report.
std::set<std::pair<int, int>> endpoints(const FileReport& report);

/// Fresh empty directory below the system temp dir, removed on destruction.
class ScratchDir {
 public:
  ScratchDir();
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

} // namespace iccscan::testing
