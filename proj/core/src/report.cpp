#include "iccscan/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace iccscan {

using Json = nlohmann::ordered_json;

CorpusSummary summarize(const std::vector<FileReport>& per_file) {
  std::set<std::string> apps;
  std::set<std::string> leaking_apps;
  std::set<std::tuple<std::string, std::string, int>> leaks;
  for (const FileReport& file : per_file) {
    apps.insert(file.app_id);
    for (int line : file.leak_lines()) {
      leaks.emplace(file.app_id, file.file, line);
      leaking_apps.insert(file.app_id);
    }
  }
  return {static_cast<int>(apps.size()), static_cast<int>(leaking_apps.size()),
          static_cast<int>(leaks.size())};
}

namespace {

void write_flow(std::ostream& out, const FlowResult& result) {
  out << "Flow:";
  for (int line : result.flow.lines) {
    out << ' ' << line;
  }
  out << '\n';
  for (const Finding& f : result.findings) {
    out << f.message << " - Line: " << f.line << '\n';
  }
}

std::string_view kind_name(FindingKind kind) {
  return kind == FindingKind::Leak ? "leak" : "warning";
}

FindingKind parse_kind(const std::string& name) {
  if (name == "leak") {
    return FindingKind::Leak;
  }
  if (name == "warning") {
    return FindingKind::Warning;
  }
  throw ReportError("unknown finding kind '" + name + "'");
}

Json file_to_json(const FileReport& file) {
  Json flows = Json::array();
  for (const FlowResult& result : file.flows) {
    Json findings = Json::array();
    for (const Finding& f : result.findings) {
      findings.push_back(
          {{"kind", kind_name(f.kind)}, {"line", f.line}, {"message", f.message}});
    }
    flows.push_back({{"lines", result.flow.lines}, {"findings", findings}});
  }
  Json diagnostics = Json::array();
  for (const Diagnostic& d : file.diagnostics) {
    diagnostics.push_back({{"line", d.line}, {"message", d.message}});
  }
  return {{"file", file.file}, {"flows", flows}, {"diagnostics", diagnostics}};
}

FileReport file_from_json(const Json& j, const std::string& app_id) {
  FileReport file;
  file.app_id = app_id;
  file.file = j.at("file").get<std::string>();
  for (const Json& flow : j.at("flows")) {
    FlowResult result;
    result.flow.lines = flow.at("lines").get<std::vector<int>>();
    if (result.flow.lines.empty()) {
      throw ReportError("flow without lines in " + file.file);
    }
    for (const Json& f : flow.at("findings")) {
      result.findings.push_back({parse_kind(f.at("kind").get<std::string>()),
                                 f.at("line").get<int>(),
                                 f.at("message").get<std::string>()});
    }
    file.flows.push_back(std::move(result));
  }
  for (const Json& d : j.at("diagnostics")) {
    file.diagnostics.push_back(
        {d.at("line").get<int>(), d.at("message").get<std::string>()});
  }
  return file;
}

} // namespace

std::string render_text(const FileReport& report) {
  std::ostringstream out;
  for (const FlowResult& result : report.flows) {
    write_flow(out, result);
  }
  return out.str();
}

std::string render_text(const CorpusReport& report) {
  std::ostringstream out;
  std::string current_app;
  bool first = true;
  for (const FileReport& file : report.per_file) {
    if (file.flows.empty()) {
      continue;
    }
    if (first || file.app_id != current_app) {
      out << "App: " << file.app_id << '\n';
      current_app = file.app_id;
      first = false;
    }
    out << "File: `" << file.file << "`\n";
    for (const FlowResult& result : file.flows) {
      write_flow(out, result);
    }
  }
  out << "Total Apps: " << report.totals.total_apps << '\n'
      << "Apps with leaks: " << report.totals.apps_with_leaks << '\n'
      << "Leaks: " << report.totals.total_leaks << '\n';
  return out.str();
}

std::string render_machine(const CorpusReport& report) {
  if (report.totals != summarize(report.per_file)) {
    throw ReportError("report totals do not match its per-file results");
  }
  Json apps = Json::array();
  for (const FileReport& file : report.per_file) {
    if (apps.empty() || apps.back()["app_id"] != file.app_id) {
      apps.push_back({{"app_id", file.app_id}, {"files", Json::array()}});
    }
    apps.back()["files"].push_back(file_to_json(file));
  }
  Json diagnostics = Json::array();
  for (const CorpusDiagnostic& d : report.diagnostics) {
    diagnostics.push_back({{"app_id", d.app_id}, {"message", d.message}});
  }
  const Json doc = {
      {"schema", kReportSchema},
      {"totals",
       {{"apps", report.totals.total_apps},
        {"apps_with_leaks", report.totals.apps_with_leaks},
        {"leaks", report.totals.total_leaks}}},
      {"apps", apps},
      {"diagnostics", diagnostics},
  };
  return doc.dump(2) + "\n";
}

CorpusReport parse_machine(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ReportError(std::string("malformed report: ") + e.what());
  }
  CorpusReport report;
  try {
    if (!doc.is_object() || doc.value("schema", "") != kReportSchema) {
      throw ReportError("not an " + std::string(kReportSchema) + " document");
    }
    const Json& totals = doc.at("totals");
    report.totals = {totals.at("apps").get<int>(),
                     totals.at("apps_with_leaks").get<int>(),
                     totals.at("leaks").get<int>()};
    for (const Json& app : doc.at("apps")) {
      const std::string app_id = app.at("app_id").get<std::string>();
      for (const Json& file : app.at("files")) {
        report.per_file.push_back(file_from_json(file, app_id));
      }
    }
    for (const Json& d : doc.at("diagnostics")) {
      report.diagnostics.push_back(
          {d.at("app_id").get<std::string>(), d.at("message").get<std::string>()});
    }
  } catch (const Json::exception& e) {
    throw ReportError(std::string("malformed report: ") + e.what());
  }
  if (report.totals != summarize(report.per_file)) {
    throw ReportError("report totals do not match its per-file results");
  }
  return report;
}

std::string emit_cleaned_source(const Analysis& analysis) {
  const MarkedFile& marked = analysis.marked;
  std::set<int> lines;
  for (const FlowResult& result : analysis.report.flows) {
    lines.insert(result.flow.lines.begin(), result.flow.lines.end());
  }
  if (lines.empty()) {
    return {};
  }

  std::ostringstream out;
  for (const MethodView& view : marked.methods) {
    std::vector<const Statement*> kept;
    std::set<int> emitted;
    for (const Statement* s : view.body) {
      if (lines.contains(s->line) && s->kind != StmtKind::Other &&
          emitted.insert(s->line).second) {
        kept.push_back(s);
      }
    }
    const bool signature_on_flow = lines.contains(view.decl->decl_line);
    if (kept.empty() && !signature_on_flow) {
      continue;
    }
    out << view.decl->decl_line << ": " << view.decl->signature << " {\n";
    for (const Statement* s : kept) {
      out << s->line << ":     " << s->raw_text << '\n';
    }
    out << "}\n";
  }
  return out.str();
}

std::filesystem::path cleaned_source_path(const std::filesystem::path& source) {
  std::filesystem::path out = source;
  out.replace_extension(".flow.txt");
  return out;
}

} // namespace iccscan
