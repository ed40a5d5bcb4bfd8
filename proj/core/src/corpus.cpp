#include "iccscan/corpus.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <fcntl.h>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "iccscan/engine.hpp"

extern char** environ;

namespace iccscan {

namespace fs = std::filesystem;

bool is_app_package(const fs::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".apk" || ext == ".dex" || ext == ".jar" || ext == ".aar";
}

namespace {

struct Task {
  fs::path path;
  std::string app_id;
  std::string file;
};

struct Outcome {
  std::optional<FileReport> report;
  std::optional<CorpusDiagnostic> diagnostic;
};

std::string package_app_id(const fs::path& package) {
  std::string id = package.filename().string();
  std::replace(id.begin(), id.end(), '.', '_');
  return id;
}

// Runs the decompiler with its output discarded; returns the exit status,
// or -1 when it could not be started or was killed.
int run_decompiler(const fs::path& decompiler, const fs::path& out_dir,
                   const fs::path& package) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null",
                                   O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null",
                                   O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null",
                                   O_WRONLY, 0);

  std::string program = decompiler.string();
  std::string flag = "-d";
  std::string out = out_dir.string();
  std::string in = package.string();
  char* argv[] = {program.data(), flag.data(), out.data(), in.data(), nullptr};

  pid_t pid = 0;
  const int rc =
      posix_spawnp(&pid, program.c_str(), &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    return -1;
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      return -1;
    }
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void collect_sources(const fs::path& app_dir, const std::string& app_id,
                     std::vector<Task>& tasks,
                     std::vector<CorpusDiagnostic>& diagnostics) {
  std::error_code ec;
  fs::recursive_directory_iterator it(
      app_dir, fs::directory_options::skip_permission_denied, ec);
  if (ec) {
    diagnostics.push_back({app_id, "cannot list " + app_dir.string() + ": " +
                                       ec.message()});
    return;
  }
  for (const fs::recursive_directory_iterator end; it != end;
       it.increment(ec)) {
    if (ec) {
      diagnostics.push_back({app_id, "cannot list " + app_dir.string() +
                                         ": " + ec.message()});
      break;
    }
    std::error_code type_ec;
    if (it->path().extension() == ".java" && !it->is_directory(type_ec)) {
      tasks.push_back({it->path(), app_id,
                       it->path().lexically_relative(app_dir).generic_string()});
    }
  }
}

Outcome analyze_task(const Task& task, const TaintConfig& config,
                     bool emit_cleaned) {
  Outcome outcome;
  try {
    SourceFile source = load_source(task.path, task.app_id);
    Analysis analysis = analyze(source, config);
    analysis.report.file = task.file;
    if (emit_cleaned) {
      const std::string cleaned = emit_cleaned_source(analysis);
      if (!cleaned.empty()) {
        std::ofstream out(cleaned_source_path(task.path), std::ios::binary);
        out << cleaned;
        if (!out) {
          outcome.diagnostic = CorpusDiagnostic{
              task.app_id, "cannot write cleaned source for " + task.file};
        }
      }
    }
    outcome.report = std::move(analysis.report);
  } catch (const std::exception& e) {
    outcome.diagnostic =
        CorpusDiagnostic{task.app_id, task.file + ": " + e.what()};
  }
  return outcome;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("iccscan-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

} // namespace

CorpusReport scan_corpus(const fs::path& root, const TaintConfig& config,
                         const ScanOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw std::invalid_argument("corpus root is not a directory: " +
                                root.string());
  }

  std::vector<fs::path> entries;
  for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
    entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());

  CorpusReport report;
  std::vector<Task> tasks;
  std::optional<TempDir> scratch;
  for (const fs::path& entry : entries) {
    if (fs::is_directory(entry, ec)) {
      collect_sources(entry, entry.filename().string(), tasks,
                      report.diagnostics);
      continue;
    }
    if (!is_app_package(entry)) {
      continue;
    }
    const std::string app_id = package_app_id(entry);
    if (!options.decompiler) {
      report.diagnostics.push_back(
          {app_id, "skipped package " + entry.filename().string() +
                       ": no decompiler configured"});
      continue;
    }
    if (!scratch) {
      scratch.emplace();
    }
    const fs::path out_dir = scratch->path() / app_id;
    const int status = run_decompiler(*options.decompiler, out_dir, entry);
    if (status != 0) {
      report.diagnostics.push_back(
          {app_id, "decompiler failed on " + entry.filename().string() +
                       (status < 0 ? std::string(" (could not run)")
                                   : " (exit status " +
                                         std::to_string(status) + ")")});
      continue;
    }
    collect_sources(out_dir, app_id, tasks, report.diagnostics);
  }

  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    return std::tie(a.app_id, a.file) < std::tie(b.app_id, b.file);
  });

  std::vector<Outcome> outcomes(tasks.size());
  unsigned jobs = options.jobs != 0 ? options.jobs
                                    : std::thread::hardware_concurrency();
  jobs = std::clamp<unsigned>(jobs, 1,
                              std::max<std::size_t>(tasks.size(), 1));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      outcomes[i] = analyze_task(tasks[i], config, options.emit_cleaned);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back(worker);
    }
  }

  for (Outcome& outcome : outcomes) {
    if (outcome.report) {
      report.per_file.push_back(std::move(*outcome.report));
    }
    if (outcome.diagnostic) {
      report.diagnostics.push_back(std::move(*outcome.diagnostic));
    }
  }
  report.totals = summarize(report.per_file);
  return report;
}

std::set<LeakKey> leak_keys(const CorpusReport& report) {
  std::set<LeakKey> keys;
  for (const FileReport& file : report.per_file) {
    for (int line : file.leak_lines()) {
      keys.insert({file.app_id, file.file, line});
    }
  }
  return keys;
}

OverlapReport compare_reports(const CorpusReport& a, const CorpusReport& b) {
  const std::set<LeakKey> keys_a = leak_keys(a);
  const std::set<LeakKey> keys_b = leak_keys(b);
  OverlapReport overlap;
  for (const LeakKey& key : keys_a) {
    (keys_b.contains(key) ? overlap.both : overlap.only_a).insert(key);
  }
  for (const LeakKey& key : keys_b) {
    if (!keys_a.contains(key)) {
      overlap.only_b.insert(key);
    }
  }
  return overlap;
}

} // namespace iccscan
