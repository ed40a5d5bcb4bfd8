#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "iccscan/config.hpp"
#include "iccscan/corpus.hpp"
#include "iccscan/engine.hpp"
#include "iccscan/report.hpp"

namespace iccscan {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string format = "text";
  std::string out;
  std::string decompiler;
  unsigned jobs = 0;
  bool emit_cleaned = false;
  bool verbose = false;
  std::string input;
  std::string report_a;
  std::string report_b;
};

TaintConfig resolve_config(const Options& opts) {
  std::string path = opts.config;
  if (path.empty()) {
    if (const char* env = std::getenv("ICC_ANALYZER_CONFIG"); env && *env) {
      path = env;
    }
  }
  return path.empty() ? default_config() : load_config(path);
}

void emit(const Options& opts, const std::string& text, std::ostream& out) {
  if (opts.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.out, std::ios::binary);
  file << text;
  if (!file) {
    throw std::runtime_error("cannot write " + opts.out);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void print_diagnostics(const FileReport& report, std::ostream& err) {
  for (const Diagnostic& d : report.diagnostics) {
    err << report.app_id << '/' << report.file << ':' << d.line << ": "
        << d.message << '\n';
  }
}

int run_analyze(const Options& opts, std::ostream& out, std::ostream& err) {
  const TaintConfig config = resolve_config(opts);
  const fs::path path = opts.input;
  if (!fs::is_regular_file(path)) {
    throw UsageError("not a file: " + opts.input);
  }
  const std::string app_id =
      fs::absolute(path).parent_path().filename().string();
  SourceFile source = load_source(path, app_id);
  Analysis analysis = analyze(source, config);
  analysis.report.file = path.filename().string();

  if (opts.emit_cleaned) {
    const std::string cleaned = emit_cleaned_source(analysis);
    if (!cleaned.empty()) {
      std::ofstream file(cleaned_source_path(path), std::ios::binary);
      file << cleaned;
      if (!file) {
        throw std::runtime_error("cannot write cleaned source");
      }
    }
  }
  if (opts.verbose) {
    print_diagnostics(analysis.report, err);
  }
  if (opts.format == "machine") {
    CorpusReport corpus;
    corpus.per_file.push_back(analysis.report);
    corpus.totals = summarize(corpus.per_file);
    emit(opts, render_machine(corpus), out);
  } else {
    emit(opts, render_text(analysis.report), out);
  }
  return kOk;
}

int run_scan(const Options& opts, std::ostream& out, std::ostream& err) {
  const TaintConfig config = resolve_config(opts);
  if (!fs::is_directory(opts.input)) {
    throw UsageError("not a directory: " + opts.input);
  }
  ScanOptions scan;
  scan.jobs = opts.jobs;
  scan.emit_cleaned = opts.emit_cleaned;
  if (!opts.decompiler.empty()) {
    scan.decompiler = opts.decompiler;
  }
  const CorpusReport report = scan_corpus(opts.input, config, scan);
  if (opts.verbose) {
    for (const FileReport& file : report.per_file) {
      print_diagnostics(file, err);
    }
  }
  for (const CorpusDiagnostic& d : report.diagnostics) {
    err << d.app_id << ": " << d.message << '\n';
  }
  emit(opts,
       opts.format == "machine" ? render_machine(report) : render_text(report),
       out);
  return kOk;
}

CorpusReport load_report(const std::string& path) {
  try {
    return parse_machine(read_file(path));
  } catch (const ReportError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int run_compare(const Options& opts, std::ostream& out) {
  const OverlapReport overlap =
      compare_reports(load_report(opts.report_a), load_report(opts.report_b));
  std::ostringstream text;
  if (opts.format == "machine") {
    const auto keys = [](const std::set<LeakKey>& set) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const LeakKey& k : set) {
        arr.push_back(
            {{"app_id", k.app_id}, {"file", k.file}, {"sink_line", k.sink_line}});
      }
      return arr;
    };
    const nlohmann::ordered_json doc = {{"only_a", keys(overlap.only_a)},
                                        {"only_b", keys(overlap.only_b)},
                                        {"both", keys(overlap.both)}};
    text << doc.dump(2) << '\n';
  } else {
    const auto section = [&](std::string_view title,
                             const std::set<LeakKey>& set) {
      text << title << ": " << set.size() << '\n';
      for (const LeakKey& k : set) {
        text << "  " << k.app_id << ' ' << k.file << ':' << k.sink_line << '\n';
      }
    };
    section("Only in A", overlap.only_a);
    section("Only in B", overlap.only_b);
    section("Both", overlap.both);
  }
  emit(opts, text.str(), out);
  return kOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Options opts;
  CLI::App app{"Static detection of inter-component communication leaks",
               "iccscan"};
  app.require_subcommand(1);
  app.add_option("--config", opts.config,
                 "Taint configuration file (default: $ICC_ANALYZER_CONFIG)");
  app.add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"text", "machine"}));
  app.add_option("--out", opts.out, "Write the report to this file");
  app.add_flag("--emit-cleaned", opts.emit_cleaned,
               "Write <Name>.flow.txt next to sources with flows");
  app.add_option("--decompiler", opts.decompiler,
                 "Decompiler for app packages at the corpus root");
  app.add_option("--jobs", opts.jobs, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", opts.verbose, "Print per-file diagnostics");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Analyze one file");
  analyze_cmd->add_option("file", opts.input, "Java source file")->required();
  CLI::App* scan_cmd =
      app.add_subcommand("scan", "Scan a corpus, one app per subdirectory");
  scan_cmd->add_option("dir", opts.input, "Corpus root")->required();
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Compare the leaks of two machine reports");
  compare_cmd->add_option("report_a", opts.report_a)->required();
  compare_cmd->add_option("report_b", opts.report_b)->required();
  for (CLI::App* sub : {analyze_cmd, scan_cmd, compare_cmd}) {
    sub->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "iccscan: " << e.what() << '\n'
        << "Run with --help for usage.\n";
    return kUsage;
  }

  try {
    if (*analyze_cmd) {
      return run_analyze(opts, out, err);
    }
    if (*scan_cmd) {
      return run_scan(opts, out, err);
    }
    return run_compare(opts, out);
  } catch (const UsageError& e) {
    err << "iccscan: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "iccscan: config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "iccscan: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "iccscan: internal error: " << e.what() << '\n';
    return kInternal;
  }
}

} // namespace iccscan
