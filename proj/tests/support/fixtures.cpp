#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "iccscan/engine.hpp"
#include "iccscan/parser.hpp"

namespace iccscan::testing {

namespace fs = std::filesystem;

fs::path fixture_path(std::string_view relative) {
  return fs::path(ICCSCAN_FIXTURE_DIR) / relative;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

ParsedFile parse_text(std::string_view text, std::string name) {
  return parse_file(SourceFile{std::move(name), "app", std::string(text)});
}

FileReport analyze_text(std::string_view text, const TaintConfig& config) {
  return analyze_file(SourceFile{"Fixture.java", "app", std::string(text)},
                      config);
}

std::set<std::pair<int, int>> endpoints(const FileReport& report) {
  std::set<std::pair<int, int>> out;
  for (const FlowResult& r : report.flows) {
    out.emplace(r.flow.source_line(), r.flow.sink_line());
  }
  return out;
}

ScratchDir::ScratchDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("iccscan-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

} // namespace iccscan::testing
