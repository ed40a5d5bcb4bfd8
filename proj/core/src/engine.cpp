#include "iccscan/engine.hpp"

#include <algorithm>

#include "iccscan/parser.hpp"

namespace iccscan {

std::string_view to_string(MarkTag tag) {
  switch (tag) {
    case MarkTag::Sink:
      return "sink";
    case MarkTag::Source:
      return "source";
    case MarkTag::SensitiveSource:
      return "sensitive_source";
    case MarkTag::Line:
      return "line";
  }
  return "line";
}

std::vector<int> FileReport::leak_lines() const {
  std::set<int> lines;
  for (const FlowResult& result : flows) {
    for (const Finding& f : result.findings) {
      if (f.kind == FindingKind::Leak) {
        lines.insert(f.line);
      }
    }
  }
  return {lines.begin(), lines.end()};
}

namespace {

// Variable a statement (re)defines: the declared local, or the target of a
// plain assignment to a bare name.
std::optional<std::string> defined_var(const Statement& s) {
  if (s.kind == StmtKind::LocalDecl) {
    return s.var_name;
  }
  if (s.kind == StmtKind::ExprStmt && s.expr &&
      s.expr->kind() == ExprKind::Assign &&
      s.expr->target().kind() == ExprKind::Name) {
    return s.expr->target().text();
  }
  return std::nullopt;
}

// Names whose values the statement reads. An assignment target is written,
// not read.
std::set<std::string> used_vars(const Statement& s) {
  if (s.kind == StmtKind::ExprStmt && s.expr &&
      s.expr->kind() == ExprKind::Assign &&
      s.expr->target().kind() == ExprKind::Name) {
    return s.expr->value().referenced_names();
  }
  return s.referenced_names();
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

const Expr& strip_casts(const Expr& e) {
  const Expr* cur = &e;
  while (cur->kind() == ExprKind::Cast) {
    cur = &cur->operand();
  }
  return *cur;
}

// Innermost name a receiver chain starts from: `a.b().c` -> "a".
const Expr* receiver_root(const Expr& call) {
  const Expr* cur = call.receiver();
  while (cur != nullptr) {
    switch (cur->kind()) {
      case ExprKind::Name:
        return cur;
      case ExprKind::Call:
      case ExprKind::FieldAccess:
        cur = cur->receiver();
        break;
      case ExprKind::Cast:
        cur = &cur->operand();
        break;
      default:
        return nullptr;
    }
  }
  return nullptr;
}

void add_mark(MarkedFile& marked, StatementRef ref, MarkTag tag,
              const std::set<std::string>& vars) {
  auto [it, inserted] = marked.marks.try_emplace(ref);
  Mark& mark = it->second;
  if (inserted) {
    mark.tag = tag;
    mark.line = marked.statement(ref).line;
  }
  if (mark.tag != MarkTag::Sink) {
    mark.tracked_vars.insert(vars.begin(), vars.end());
  }
}

// Reverse walk inside one method starting just above `start`. `live` holds
// the variables whose values still reach the starting statement.
void propagate_backwards(MarkedFile& marked, std::size_t method,
                         std::size_t start, std::set<std::string> live,
                         std::set<int>* slice) {
  const MethodView& view = marked.methods[method];
  for (std::size_t i = start; i-- > 0;) {
    if (live.empty()) {
      break;
    }
    const Statement& s = *view.body[i];
    const StatementRef ref{method, i};
    const auto def = defined_var(s);
    if (def && live.contains(*def)) {
      std::set<std::string> uses = used_vars(s);
      std::set<std::string> tracked = uses;
      tracked.insert(*def);
      add_mark(marked, ref, MarkTag::Line, tracked);
      live.erase(*def);
      live.insert(uses.begin(), uses.end());
    } else {
      const std::set<std::string> names = s.referenced_names();
      if (!intersects(names, live)) {
        continue;
      }
      add_mark(marked, ref, MarkTag::Line, names);
      live.insert(names.begin(), names.end());
    }
    if (slice != nullptr) {
      slice->insert(s.line);
    }
  }
}

} // namespace

MarkedFile::MarkedFile(std::shared_ptr<const ParsedFile> file)
    : parsed(std::move(file)) {
  for (const ClassDecl& cls : parsed->classes) {
    for (const MethodDecl& method : cls.methods) {
      MethodView view;
      view.decl = &method;
      view.class_name = cls.name;
      view.body = flatten(method.body);
      for (const Param& p : method.params) {
        view.local_types[p.name] = p.type_name;
      }
      for (const Statement* s : view.body) {
        if (s->kind == StmtKind::LocalDecl) {
          view.local_types[s->var_name] = s->type_name;
        }
      }
      methods.push_back(std::move(view));
    }
  }
  std::stable_sort(methods.begin(), methods.end(),
                   [](const MethodView& a, const MethodView& b) {
                     return a.decl->decl_line < b.decl->decl_line;
                   });
}

std::optional<std::size_t> MarkedFile::resolve_call(const Expr& call) const {
  if (call.kind() != ExprKind::Call) {
    return std::nullopt;
  }
  if (const Expr* receiver = call.receiver()) {
    const bool self = receiver->kind() == ExprKind::Literal &&
                      receiver->text() == "this";
    bool own_class = false;
    if (receiver->kind() == ExprKind::Name) {
      for (const ClassDecl& cls : parsed->classes) {
        const auto dot = cls.name.rfind('.');
        const std::string simple =
            dot == std::string::npos ? cls.name : cls.name.substr(dot + 1);
        own_class = own_class || simple == receiver->text();
      }
    }
    if (!self && !own_class) {
      return std::nullopt;
    }
  }
  std::optional<std::size_t> by_name;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const MethodDecl& m = *methods[i].decl;
    if (m.name != call.text()) {
      continue;
    }
    if (m.params.size() == call.args().size()) {
      return i;
    }
    if (!by_name) {
      by_name = i;
    }
  }
  return by_name;
}

MarkedFile mark_sinks(std::shared_ptr<const ParsedFile> parsed,
                      const TaintConfig& config) {
  MarkedFile marked(std::move(parsed));
  for (std::size_t m = 0; m < marked.methods.size(); ++m) {
    const MethodView& view = marked.methods[m];
    for (std::size_t i = 0; i < view.body.size(); ++i) {
      const Statement& s = *view.body[i];
      if (s.kind == StmtKind::Other || !s.expr) {
        continue;
      }
      const Expr* sink = nullptr;
      s.expr->visit([&](const Expr& e) {
        if (sink == nullptr &&
            is_sink_call(e, config, &view.local_types) == SinkDecision::Sink) {
          sink = &e;
        }
      });
      if (sink == nullptr) {
        continue;
      }
      Mark mark;
      mark.tag = MarkTag::Sink;
      mark.line = s.line;
      mark.sink_method = sink->text();
      for (const Expr& arg : sink->args()) {
        mark.tracked_vars.insert(arg.referenced_names().begin(),
                                 arg.referenced_names().end());
      }
      marked.marks.emplace(StatementRef{m, i}, std::move(mark));
    }
  }
  return marked;
}

MarkedFile back_propagate(MarkedFile marked) {
  std::vector<std::pair<StatementRef, std::set<std::string>>> sinks;
  for (const auto& [ref, mark] : marked.marks) {
    if (mark.tag == MarkTag::Sink) {
      sinks.emplace_back(ref, mark.tracked_vars);
    }
  }
  for (const auto& [ref, vars] : sinks) {
    propagate_backwards(marked, ref.method, ref.index, vars, nullptr);
  }
  return marked;
}

std::vector<StatementRef> extract_marked_declarations(MarkedFile& marked) {
  std::vector<StatementRef> decls;
  for (const auto& [ref, mark] : marked.marks) {
    const Statement& s = marked.statement(ref);
    if (s.kind != StmtKind::LocalDecl || !s.expr) {
      continue;
    }
    const Expr& init = strip_casts(*s.expr);
    if (init.kind() != ExprKind::Call) {
      continue;
    }
    if (marked.resolve_call(init)) {
      decls.push_back(ref);
      continue;
    }
    const Expr* receiver = init.receiver();
    if (receiver == nullptr ||
        (receiver->kind() == ExprKind::Literal && receiver->text() == "this")) {
      marked.diagnostics.push_back(
          {s.line, "declaration of '" + s.var_name + "' calls " + init.text() +
                       "(), which is not defined in this file"});
    }
  }
  marked.marked_declarations = decls;
  return decls;
}

MarkedFile back_propagate_declarations(MarkedFile marked,
                                       std::span<const StatementRef> decls) {
  std::set<std::size_t> visited;
  for (const StatementRef& ref : decls) {
    const Statement& s = marked.statement(ref);
    const auto callee = marked.resolve_call(strip_casts(*s.expr));
    if (!callee || !visited.insert(*callee).second) {
      continue;
    }
    const MethodView& view = marked.methods[*callee];
    Mark method_mark;
    method_mark.line = view.decl->decl_line;
    marked.method_marks[*callee] = method_mark;

    std::set<int> slice;
    for (std::size_t i = 0; i < view.body.size(); ++i) {
      const Statement& ret = *view.body[i];
      if (ret.kind != StmtKind::Return || !ret.expr) {
        continue;
      }
      const std::set<std::string>& names = ret.expr->referenced_names();
      add_mark(marked, StatementRef{*callee, i}, MarkTag::Line, names);
      slice.insert(ret.line);
      propagate_backwards(marked, *callee, i, names, &slice);
    }
    marked.return_slices[*callee] = std::move(slice);
  }
  return marked;
}

MarkedFile classify_sources(MarkedFile marked, const TaintConfig& config) {
  for (auto& [ref, mark] : marked.marks) {
    if (mark.tag != MarkTag::Line) {
      continue;
    }
    const Statement& s = marked.statement(ref);
    if (s.kind != StmtKind::LocalDecl) {
      continue;
    }
    if (config.sources.contains(s.type_name)) {
      mark.tag = MarkTag::Source;
    } else if (config.sensitive_sources.contains(s.type_name)) {
      mark.tag = MarkTag::SensitiveSource;
    }
  }
  return marked;
}

void extract_marked_methods(MarkedFile& marked) {
  marked.marked_methods.clear();
  for (const auto& [ref, mark] : marked.marks) {
    marked.marked_methods.insert(marked.methods[ref.method].decl->name);
  }
  for (const auto& [method, mark] : marked.method_marks) {
    marked.marked_methods.insert(marked.methods[method].decl->name);
  }
}

std::vector<DataFlow> draw_data_flows(const MarkedFile& marked) {
  std::vector<DataFlow> flows;
  std::set<std::pair<int, int>> seen;

  for (const auto& [source_ref, source_mark] : marked.marks) {
    if (source_mark.tag != MarkTag::Source) {
      continue;
    }
    const MethodView& view = marked.methods[source_ref.method];
    if (!marked.marked_methods.empty() &&
        !marked.marked_methods.contains(view.decl->name)) {
      continue;
    }
    const Statement& source = marked.statement(source_ref);
    std::set<std::string> traced{source.var_name};
    std::vector<int> prefix{source.line};

    if (source.expr) {
      const auto callee = marked.resolve_call(strip_casts(*source.expr));
      if (callee && *callee != source_ref.method) {
        if (const auto slice = marked.return_slices.find(*callee);
            slice != marked.return_slices.end()) {
          prefix.push_back(marked.methods[*callee].decl->decl_line);
          prefix.insert(prefix.end(), slice->second.begin(),
                        slice->second.end());
        }
      }
    }

    for (std::size_t i = source_ref.index + 1; i < view.body.size(); ++i) {
      const StatementRef ref{source_ref.method, i};
      const Statement& s = *view.body[i];
      const auto def = defined_var(s);
      const bool touches = intersects(used_vars(s), traced);
      const Mark* mark = marked.mark(ref);
      if (mark != nullptr && touches) {
        if (mark->tag == MarkTag::Sink) {
          if (intersects(mark->tracked_vars, traced) &&
              seen.emplace(source.line, s.line).second) {
            DataFlow flow;
            for (int line : prefix) {
              if (std::find(flow.lines.begin(), flow.lines.end(), line) ==
                  flow.lines.end()) {
                flow.lines.push_back(line);
              }
            }
            flow.lines.push_back(s.line);
            flows.push_back(std::move(flow));
          }
          continue;
        }
        prefix.push_back(s.line);
        if (def) {
          traced.insert(*def);
        }
      } else if (def && !touches) {
        traced.erase(*def);
      }
    }
  }

  std::stable_sort(flows.begin(), flows.end(),
                   [](const DataFlow& a, const DataFlow& b) {
                     return std::pair(a.source_line(), a.sink_line()) <
                            std::pair(b.source_line(), b.sink_line());
                   });
  return flows;
}

std::vector<Finding> observe_flow(const DataFlow& flow, const MarkedFile& marked,
                                  const TaintConfig& config) {
  const std::set<int> flow_lines(flow.lines.begin(), flow.lines.end());

  // Flow statements per method, and the variables they carry.
  std::map<int, StatementRef> by_line;
  std::map<std::size_t, std::set<std::string>> traced;
  for (const auto& [ref, mark] : marked.marks) {
    if (!flow_lines.contains(mark.line) || by_line.contains(mark.line)) {
      continue;
    }
    by_line.emplace(mark.line, ref);
    if (const auto def = defined_var(marked.statement(ref))) {
      traced[ref.method].insert(*def);
    }
  }

  // Whether each flow statement puts sensitive data into a traced variable.
  // Sensitive variables are tracked in statement order: declarations of a
  // sensitive type, values computed from them, and objects they were
  // attached to.
  std::map<StatementRef, bool> warns;
  for (const auto& [method, vars] : traced) {
    const MethodView& view = marked.methods[method];
    std::set<std::string> sensitive;
    for (const Param& p : view.decl->params) {
      if (config.sensitive_sources.contains(p.type_name)) {
        sensitive.insert(p.name);
      }
    }
    for (std::size_t i = 0; i < view.body.size(); ++i) {
      const Statement& s = *view.body[i];
      const StatementRef ref{method, i};
      const auto def = defined_var(s);
      const std::set<std::string> uses = used_vars(s);

      const Expr* call = nullptr;
      const Expr* root = nullptr;
      std::set<std::string> arg_names;
      if (s.kind == StmtKind::ExprStmt && s.expr &&
          s.expr->kind() == ExprKind::Call) {
        call = &*s.expr;
        root = receiver_root(*call);
        for (const Expr& arg : call->args()) {
          arg_names.insert(arg.referenced_names().begin(),
                           arg.referenced_names().end());
        }
        if (root != nullptr) {
          arg_names.erase(root->text());
        }
      }

      if (flow_lines.contains(s.line) && by_line.contains(s.line) &&
          by_line.at(s.line) == ref) {
        bool warn = false;
        if (root != nullptr && vars.contains(root->text()) &&
            intersects(arg_names, sensitive)) {
          warn = true;
        }
        if (def && vars.contains(*def) && intersects(uses, sensitive)) {
          warn = true;
        }
        warns[ref] = warn;
      }

      if (s.kind == StmtKind::LocalDecl &&
          config.sensitive_sources.contains(s.type_name)) {
        sensitive.insert(s.var_name);
      } else if (def && intersects(uses, sensitive)) {
        sensitive.insert(*def);
      } else if (def) {
        sensitive.erase(*def);
      }
      if (root != nullptr && intersects(arg_names, sensitive)) {
        sensitive.insert(root->text());
      }
    }
  }

  std::vector<Finding> findings;
  for (int line : flow.lines) {
    const auto it = by_line.find(line);
    if (it == by_line.end()) {
      continue;
    }
    const Mark& mark = marked.marks.at(it->second);
    if (line == flow.sink_line() && mark.tag == MarkTag::Sink) {
      findings.push_back({FindingKind::Leak, line, config.tip(mark.sink_method)});
      continue;
    }
    if (const auto w = warns.find(it->second); w != warns.end() && w->second) {
      findings.push_back(
          {FindingKind::Warning, line, std::string(kSensitiveWarning)});
    }
  }
  return findings;
}

Analysis analyze(const SourceFile& source, const TaintConfig& config) {
  auto parsed = std::make_shared<const ParsedFile>(parse_file(source));

  MarkedFile marked = mark_sinks(parsed, config);
  marked = back_propagate(std::move(marked));
  const std::vector<StatementRef> decls = extract_marked_declarations(marked);
  marked = back_propagate_declarations(std::move(marked), decls);
  marked = classify_sources(std::move(marked), config);
  extract_marked_methods(marked);

  FileReport report;
  report.file = source.path.generic_string();
  report.app_id = source.app_id;
  for (DataFlow& flow : draw_data_flows(marked)) {
    std::vector<Finding> findings = observe_flow(flow, marked, config);
    report.flows.push_back({std::move(flow), std::move(findings)});
  }
  report.diagnostics = parsed->parse_diagnostics;
  report.diagnostics.insert(report.diagnostics.end(),
                            marked.diagnostics.begin(),
                            marked.diagnostics.end());
  std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return a.line < b.line;
                   });
  return Analysis{std::move(marked), std::move(report)};
}

FileReport analyze_file(const SourceFile& source, const TaintConfig& config) {
  return analyze(source, config).report;
}

} // namespace iccscan
