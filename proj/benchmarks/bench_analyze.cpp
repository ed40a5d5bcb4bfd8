#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "iccscan/corpus.hpp"
#include "iccscan/engine.hpp"
#include "iccscan/parser.hpp"

namespace {

using namespace iccscan;

const std::filesystem::path kFixtures = ICCSCAN_FIXTURE_DIR;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// A class with `methods` methods, each building, filling and broadcasting
// an intent.
std::string synthetic_class(int methods) {
  std::ostringstream out;
  out << "import android.content.Intent;\n\npublic class Big {\n";
  for (int m = 0; m < methods; ++m) {
    out << "    void send" << m << "(String value) {\n"
        << "        Intent a = new Intent(\"act" << m << "\");\n"
        << "        a.putExtra(\"k\", value);\n"
        << "        Intent b = a;\n"
        << "        String s = b.getStringExtra(\"k\");\n"
        << "        b.putExtra(\"copy\", s);\n"
        << "        if (value != null) {\n"
        << "            sendBroadcast(b);\n"
        << "        }\n"
        << "        sendBroadcast(a, \"perm\");\n"
        << "    }\n";
  }
  out << "}\n";
  return out.str();
}

void BM_AnalyzeGolden(benchmark::State& state) {
  const SourceFile source{"BroadcastService.java", "app",
                          slurp(kFixtures / "BroadcastService.java")};
  const TaintConfig config = default_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_file(source, config));
  }
}
BENCHMARK(BM_AnalyzeGolden);

void BM_ParseSynthetic(benchmark::State& state) {
  const SourceFile source{"Big.java", "app",
                          synthetic_class(static_cast<int>(state.range(0)))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_file(source));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(source.text.size()));
}
BENCHMARK(BM_ParseSynthetic)->Range(8, 512);

void BM_AnalyzeSynthetic(benchmark::State& state) {
  const SourceFile source{"Big.java", "app",
                          synthetic_class(static_cast<int>(state.range(0)))};
  const TaintConfig config = default_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_file(source, config));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AnalyzeSynthetic)->Range(8, 512)->Complexity();

void BM_ScanCorpus(benchmark::State& state) {
  const TaintConfig config = default_config();
  ScanOptions options;
  options.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_corpus(kFixtures / "corpus", config, options));
  }
}
BENCHMARK(BM_ScanCorpus)->Arg(1)->Arg(4);

} // namespace

BENCHMARK_MAIN();
