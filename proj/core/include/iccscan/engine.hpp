#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "iccscan/ast.hpp"
#include "iccscan/config.hpp"
#include "iccscan/findings.hpp"
#include "iccscan/source.hpp"

namespace iccscan {

enum class MarkTag { Sink, Source, SensitiveSource, Line };

std::string_view to_string(MarkTag tag);

struct Mark {
  MarkTag tag = MarkTag::Line;
  int line = 0;
  /// Identifiers this statement contributes to the trace. For sinks: the
  /// names referenced by the sink call's arguments.
  std::set<std::string> tracked_vars;
  /// Sink marks only: the sink method name.
  std::string sink_method;
};

/// Addresses one statement: method index into MarkedFile::methods and
/// position in that method's flattened body.
struct StatementRef {
  std::size_t method = 0;
  std::size_t index = 0;

  friend auto operator<=>(const StatementRef&, const StatementRef&) = default;
};

/// A method with its body flattened in source order.
struct MethodView {
  const MethodDecl* decl = nullptr;
  std::string class_name;
  std::vector<const Statement*> body;
  /// Parameter and local variable types, for receiver resolution.
  LocalTypes local_types;
};

/// A parsed file plus the marks produced by the pipeline stages.
struct MarkedFile {
  std::shared_ptr<const ParsedFile> parsed;
  /// Every method of every class, ordered by declaration line.
  std::vector<MethodView> methods;
  std::map<StatementRef, Mark> marks;
  /// Method-level marks (the declaration line of helper methods).
  std::map<std::size_t, Mark> method_marks;
  /// Marked declarations initialized by a same-file call.
  std::vector<StatementRef> marked_declarations;
  /// Names of methods containing at least one mark.
  std::set<std::string> marked_methods;
  /// Per helper method: the statement lines marked by back-propagating
  /// from its return statements.
  std::map<std::size_t, std::set<int>> return_slices;
  std::vector<Diagnostic> diagnostics;

  explicit MarkedFile(std::shared_ptr<const ParsedFile> file);

  const Statement& statement(StatementRef ref) const {
    return *methods.at(ref.method).body.at(ref.index);
  }
  const Mark* mark(StatementRef ref) const {
    const auto it = marks.find(ref);
    return it == marks.end() ? nullptr : &it->second;
  }
  /// Index of the same-file method a call resolves to, if any.
  std::optional<std::size_t> resolve_call(const Expr& call) const;
};

/// Marks every statement holding an unrestricted sink call.
MarkedFile mark_sinks(std::shared_ptr<const ParsedFile> parsed,
                      const TaintConfig& config);

/// Walks backwards from each sink, marking statements that feed it.
MarkedFile back_propagate(MarkedFile marked);

/// Marked declarations whose initializer calls a method of the same file.
/// Records them in `marked.marked_declarations`; calls to receiver-less
/// methods the file does not define add a diagnostic.
std::vector<StatementRef> extract_marked_declarations(MarkedFile& marked);

/// For each declaration's callee, marks its return statements and
/// back-propagates from them. Each callee is processed once.
MarkedFile back_propagate_declarations(MarkedFile marked,
                                       std::span<const StatementRef> decls);

/// Retags marked declarations whose type is a source or sensitive source.
MarkedFile classify_sources(MarkedFile marked, const TaintConfig& config);

/// Fills `marked_methods` with every method that holds a mark.
void extract_marked_methods(MarkedFile& marked);

/// Forward walk from each source declaration to every sink it reaches; one
/// flow per (source, sink) pair, ordered by source line then sink line.
std::vector<DataFlow> draw_data_flows(const MarkedFile& marked);

/// Warnings for statements that attach sensitive data to the traced
/// variable, then the Leak for the sink, in flow order.
std::vector<Finding> observe_flow(const DataFlow& flow, const MarkedFile& marked,
                                  const TaintConfig& config);

/// Everything the pipeline produced for one file.
struct Analysis {
  MarkedFile marked;
  FileReport report;
};

/// Full pipeline: parse, mark sinks, back-propagate, follow helper calls,
/// classify sources, draw and observe flows.
Analysis analyze(const SourceFile& source, const TaintConfig& config);

FileReport analyze_file(const SourceFile& source, const TaintConfig& config);

} // namespace iccscan
