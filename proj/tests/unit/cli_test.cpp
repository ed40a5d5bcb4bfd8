#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "iccscan/report.hpp"

namespace iccscan {
namespace {

namespace fs = std::filesystem;
using testing::fixture_path;
using testing::read_text;
using testing::ScratchDir;
using testing::write_text;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

TEST(Cli, AnalyzeGolden) {
  const CliRun r = run({"analyze", fixture_path("BroadcastService.java").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_text(fixture_path("BroadcastService.expected.txt")));
}

TEST(Cli, AnalyzeMachineFormat) {
  const CliRun r = run({"--format", "machine", "analyze",
                     fixture_path("BroadcastService.java").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const CorpusReport parsed = parse_machine(r.out);
  EXPECT_EQ(parsed.totals, (CorpusSummary{1, 1, 1}));
  ASSERT_EQ(parsed.per_file.size(), 1u);
  EXPECT_EQ(parsed.per_file[0].file, "BroadcastService.java");
  EXPECT_EQ(parsed.per_file[0].app_id, "fixtures");
}

TEST(Cli, ScanEmptyDirectory) {
  ScratchDir dir;
  const CliRun r = run({"scan", dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Total Apps: 0\nApps with leaks: 0\nLeaks: 0\n");
}

TEST(Cli, ScanCorpusFooter) {
  const CliRun r = run({"scan", fixture_path("corpus").string(), "--jobs", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Total Apps: 10\nApps with leaks: 6\nLeaks: 9\n"),
            std::string::npos);
}

TEST(Cli, OutWritesFileAndCompareAgainstItself) {
  ScratchDir dir;
  const std::string report = (dir.path() / "r.json").string();
  const CliRun scan = run({"scan", fixture_path("corpus").string(), "--format",
                        "machine", "--out", report});
  ASSERT_EQ(scan.code, 0) << scan.err;
  EXPECT_TRUE(scan.out.empty());
  EXPECT_EQ(parse_machine(read_text(report)).totals, (CorpusSummary{10, 6, 9}));

  const CliRun cmp = run({"compare", report, report});
  EXPECT_EQ(cmp.code, 0);
  EXPECT_EQ(cmp.out.rfind("Only in A: 0\nOnly in B: 0\nBoth: 9\n", 0), 0u);

  const CliRun truth =
      run({"compare", report, fixture_path("corpus_ground_truth.json").string()});
  EXPECT_EQ(truth.code, 0);
  EXPECT_EQ(truth.out.rfind("Only in A: 0\nOnly in B: 0\nBoth: 9\n", 0), 0u);
}

TEST(Cli, CompareMachineFormat) {
  const std::string truth = fixture_path("corpus_ground_truth.json").string();
  const CliRun r = run({"--format", "machine", "compare", truth, truth});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"only_a\": []"), std::string::npos);
  EXPECT_NE(r.out.find("\"both\": ["), std::string::npos);
}

TEST(Cli, ErrorsExitWithTwo) {
  ScratchDir dir;
  write_text(dir.path() / "bad.json", "{ not json");
  write_text(dir.path() / "bad.cfg", "{ not json");
  const std::string golden = fixture_path("BroadcastService.java").string();
  EXPECT_EQ(run({"scan", (dir.path() / "missing").string()}).code, 2);
  EXPECT_EQ(run({"analyze", (dir.path() / "Missing.java").string()}).code, 2);
  EXPECT_EQ(run({"compare", (dir.path() / "bad.json").string(),
                 (dir.path() / "bad.json").string()}).code, 2);
  EXPECT_EQ(run({"--config", (dir.path() / "bad.cfg").string(), "analyze", golden}).code, 2);
  EXPECT_EQ(run({"--config", (dir.path() / "none.cfg").string(), "analyze", golden}).code, 2);
  EXPECT_EQ(run({"--bogus", "analyze", golden}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "analyze", golden}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("analyze"), std::string::npos);
}

TEST(Cli, ConfigFromEnvironment) {
  ScratchDir dir;
  write_text(dir.path() / "bad.cfg", "{ not json");
  const std::string golden = fixture_path("BroadcastService.java").string();
  ::setenv("ICC_ANALYZER_CONFIG", (dir.path() / "bad.cfg").string().c_str(), 1);
  const int with_bad_env = run({"analyze", golden}).code;
  ::unsetenv("ICC_ANALYZER_CONFIG");
  EXPECT_EQ(with_bad_env, 2);
  EXPECT_EQ(run({"analyze", golden}).code, 0);
}

TEST(Cli, EmitCleanedInAnalyze) {
  ScratchDir dir;
  fs::copy_file(fixture_path("BroadcastService.java"), dir.path() / "BroadcastService.java");
  const CliRun r = run({"--emit-cleaned", "analyze", (dir.path() / "BroadcastService.java").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir.path() / "BroadcastService.flow.txt"));
}

} // namespace
} // namespace iccscan
