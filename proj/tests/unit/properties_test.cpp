#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "fixture_gen.hpp"
#include "fixtures.hpp"
#include "iccscan/engine.hpp"
#include "iccscan/parser.hpp"

namespace iccscan {
namespace {

namespace fs = std::filesystem;
using testing::fixture_path;
using testing::read_text;

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  return b == std::string::npos ? "" : s.substr(b);
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(fixture_path(""))) {
    if (e.path().extension() == ".java") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Analysis run(const std::string& text) {
  return analyze(SourceFile{"F.java", "app", text}, default_config());
}

TEST(Properties, StatementLinesMatchSourceText) {
  for (std::uint32_t seed = 1; seed <= 60; ++seed) {
    const std::string text = testing::generate_fixture(seed);
    const auto lines = split_lines(text);
    const ParsedFile f = testing::parse_text(text);
    for (const ClassDecl& c : f.classes) {
      for (const MethodDecl& m : c.methods) {
        EXPECT_TRUE(trim(lines.at(m.decl_line - 1)).starts_with(m.signature));
        for (const Statement* s : flatten(m.body)) {
          const std::string src = trim(lines.at(s->line - 1));
          EXPECT_TRUE(src.starts_with(s->raw_text))
              << "seed " << seed << " line " << s->line << ": '" << s->raw_text
              << "' vs '" << src << "'";
        }
      }
    }
  }
}

TEST(Properties, FlattenedOrderFollowsSource) {
  for (std::uint32_t seed = 1; seed <= 60; ++seed) {
    const ParsedFile f = testing::parse_text(testing::generate_fixture(seed));
    for (const ClassDecl& c : f.classes) {
      for (const MethodDecl& m : c.methods) {
        std::vector<int> lines;
        for (const Statement* s : flatten(m.body)) {
          lines.push_back(s->line);
        }
        EXPECT_TRUE(std::adjacent_find(lines.begin(), lines.end(),
                                       std::greater_equal<>()) == lines.end())
            << "seed " << seed;
      }
    }
  }
  for (const fs::path& path : corpus_files()) {
    const ParsedFile f = testing::parse_text(read_text(path));
    for (const ClassDecl& c : f.classes) {
      for (const MethodDecl& m : c.methods) {
        std::vector<int> lines;
        for (const Statement* s : flatten(m.body)) {
          lines.push_back(s->line);
        }
        EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end())) << path;
      }
    }
  }
}

TEST(Properties, EverySinkNameOccurrenceIsACallNode) {
  const std::regex call(R"(\bsendBroadcast\s*\()");
  for (const fs::path& path : corpus_files()) {
    const std::string text = read_text(path);
    std::map<int, int> expected;
    int line_no = 0;
    for (const std::string& line : split_lines(text)) {
      ++line_no;
      const std::string code = line.substr(0, line.find("//"));
      expected[line_no] += static_cast<int>(std::distance(
          std::sregex_iterator(code.begin(), code.end(), call),
          std::sregex_iterator()));
    }
    std::erase_if(expected, [](const auto& e) { return e.second == 0; });

    std::map<int, int> found;
    const ParsedFile f = testing::parse_text(text);
    for (const ClassDecl& c : f.classes) {
      for (const MethodDecl& m : c.methods) {
        for (const Statement* s : flatten(m.body)) {
          if (s->expr) {
            s->expr->visit([&](const Expr& e) {
              if (e.kind() == ExprKind::Call && e.text() == "sendBroadcast") {
                ++found[s->line];
              }
            });
          }
        }
      }
    }
    EXPECT_EQ(found, expected) << path;
  }
}

void check_report_invariants(const Analysis& a, const std::string& where) {
  const MarkedFile& m = a.marked;
  std::map<int, const Mark*> by_line;
  for (const auto& [ref, mark] : m.marks) {
    by_line.emplace(mark.line, &mark);
    const Statement& s = m.statement(ref);
    if (mark.tag == MarkTag::Source || mark.tag == MarkTag::SensitiveSource) {
      EXPECT_EQ(s.kind, StmtKind::LocalDecl) << where;
    }
    bool has_sink = false;
    if (s.expr) {
      s.expr->visit([&](const Expr& e) {
        has_sink = has_sink || is_sink_call(e, default_config(),
                                            &m.methods[ref.method].local_types) ==
                                   SinkDecision::Sink;
      });
    }
    EXPECT_EQ(mark.tag == MarkTag::Sink, has_sink) << where << " line " << mark.line;
  }
  for (const StatementRef& ref : m.marked_declarations) {
    EXPECT_NE(m.mark(ref), nullptr) << where;
  }

  std::set<int> sinks;
  for (const FlowResult& r : a.report.flows) {
    const auto& lines = r.flow.lines;
    ASSERT_FALSE(lines.empty());
    EXPECT_EQ(std::set<int>(lines.begin(), lines.end()).size(), lines.size())
        << where;
    ASSERT_TRUE(by_line.contains(r.flow.source_line())) << where;
    ASSERT_TRUE(by_line.contains(r.flow.sink_line())) << where;
    EXPECT_EQ(by_line.at(r.flow.source_line())->tag, MarkTag::Source) << where;
    EXPECT_EQ(by_line.at(r.flow.sink_line())->tag, MarkTag::Sink) << where;
    sinks.insert(r.flow.sink_line());

    // Lines increase within a method; the only descent is into a spliced
    // helper, which happens right after the source line.
    int descents = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i] < lines[i - 1]) {
        ++descents;
        EXPECT_EQ(i, 1u) << where;
      }
    }
    EXPECT_LE(descents, 1) << where;
    if (descents == 1) {
      // After the helper's lines the flow climbs back above the source.
      const auto back = std::find_if(lines.begin() + 1, lines.end(),
                                     [&](int l) { return l > lines[0]; });
      EXPECT_TRUE(std::is_sorted(back, lines.end())) << where;
    }

    int leaks = 0;
    for (const Finding& f : r.findings) {
      EXPECT_NE(std::find(lines.begin(), lines.end(), f.line), lines.end());
      if (f.kind == FindingKind::Leak) {
        ++leaks;
        EXPECT_EQ(f.line, r.flow.sink_line());
      }
    }
    EXPECT_EQ(leaks, 1) << where;
    if (!r.findings.empty()) {
      EXPECT_EQ(r.findings.back().kind, FindingKind::Leak) << where;
    }
  }
  for (int line : a.report.leak_lines()) {
    EXPECT_TRUE(sinks.contains(line));
  }
  EXPECT_TRUE(std::is_sorted(
      a.report.flows.begin(), a.report.flows.end(),
      [](const FlowResult& x, const FlowResult& y) {
        return std::pair(x.flow.source_line(), x.flow.sink_line()) <
               std::pair(y.flow.source_line(), y.flow.sink_line());
      }))
      << where;
}

TEST(Properties, ReportInvariantsOnGeneratedFixtures) {
  for (std::uint32_t seed = 1; seed <= 150; ++seed) {
    check_report_invariants(run(testing::generate_fixture(seed)),
                            "seed " + std::to_string(seed));
  }
}

TEST(Properties, ReportInvariantsOnFixtureFiles) {
  for (const fs::path& path : corpus_files()) {
    check_report_invariants(run(read_text(path)), path.string());
  }
}

TEST(Properties, ExemptBroadcastsNeverEndAFlow) {
  for (std::uint32_t seed = 1; seed <= 150; ++seed) {
    const std::string text = testing::generate_fixture(seed);
    const auto lines = split_lines(text);
    for (const FlowResult& r : run(text).report.flows) {
      const std::string& sink = lines.at(r.flow.sink_line() - 1);
      EXPECT_EQ(sink.find("LocalBroadcastManager"), std::string::npos);
      EXPECT_EQ(sink.find("lbm"), std::string::npos);
      EXPECT_EQ(sink.find(", \"gen.permission\""), std::string::npos);
    }
  }
}

TEST(Properties, AnalysisIsDeterministic) {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    const std::string text = testing::generate_fixture(seed);
    EXPECT_EQ(run(text).report, run(text).report);
  }
}

TEST(Properties, GeneratorIsDeterministicAndInShape) {
  for (std::uint32_t seed = 1; seed <= 50; ++seed) {
    const std::string text = testing::generate_fixture(seed);
    EXPECT_EQ(text, testing::generate_fixture(seed));
    const ParsedFile f = testing::parse_text(text);
    ASSERT_EQ(f.classes.size(), 1u);
    const auto& methods = f.classes[0].methods;
    EXPECT_GE(methods.size(), 1u);
    EXPECT_LE(methods.size(), 2u);
    for (const MethodDecl& m : methods) {
      const std::size_t n = flatten(m.body).size();
      EXPECT_GE(n, 3u);
      EXPECT_LE(n, 15u);
    }
    EXPECT_TRUE(f.parse_diagnostics.empty()) << "seed " << seed;
  }
}

} // namespace
} // namespace iccscan
