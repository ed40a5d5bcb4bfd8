#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "iccscan/source.hpp"

namespace iccscan {

enum class ExprKind {
  New,         // text = simple type name, args = constructor arguments
  Call,        // text = method name, optional receiver, args
  Name,        // text = identifier
  FieldAccess, // text = field name, receiver
  Cast,        // text = simple type name, one operand
  StringLit,   // text = literal contents without quotes
  Literal,     // numbers, chars, null, booleans, this, super, class literals
  Assign,      // plain '=' assignment: target, value
  Compound,    // text = operator; operands (binary, unary, ternary, index, ...)
  Other,       // text = raw source; constructs outside the supported subset
};

/// Immutable expression tree node.
///
/// referenced_names() holds every identifier that names a variable
/// somewhere inside the node: method names, field names after a dot and
/// type names never count, and string literals contribute nothing.
class Expr {
 public:
  static Expr make_new(std::string type, std::vector<Expr> args);
  static Expr make_call(std::optional<Expr> receiver, std::string method,
                        std::vector<Expr> args);
  static Expr make_name(std::string identifier);
  static Expr make_field_access(Expr receiver, std::string field);
  static Expr make_cast(std::string type, Expr operand);
  static Expr make_string(std::string value);
  static Expr make_literal(std::string text);
  static Expr make_assign(Expr target, Expr value);
  static Expr make_compound(std::string op, std::vector<Expr> operands);
  static Expr make_other(std::string raw);

  ExprKind kind() const noexcept { return kind_; }
  const std::string& text() const noexcept { return text_; }

  bool has_receiver() const noexcept { return has_receiver_; }
  /// Receiver of a Call or FieldAccess; nullptr otherwise.
  const Expr* receiver() const noexcept;
  /// Arguments of a New or Call; empty otherwise.
  std::span<const Expr> args() const noexcept;
  std::span<const Expr> children() const noexcept { return children_; }

  /// Cast operand.
  const Expr& operand() const { return children_.at(0); }
  /// Assignment sides.
  const Expr& target() const { return children_.at(0); }
  const Expr& value() const { return children_.at(1); }

  const std::set<std::string>& referenced_names() const noexcept {
    return names_;
  }

  /// Visits this node and every descendant, parents first.
  template <typename Fn>
  void visit(Fn&& fn) const {
    fn(*this);
    for (const Expr& child : children_) {
      child.visit(fn);
    }
  }

 private:
  Expr(ExprKind kind, std::string text, std::vector<Expr> children,
       bool has_receiver);

  ExprKind kind_;
  std::string text_;
  std::vector<Expr> children_;
  bool has_receiver_ = false;
  std::set<std::string> names_;
};

enum class StmtKind { LocalDecl, ExprStmt, Return, Other };

struct Statement {
  /// 1-based line of the statement's first token.
  int line = 0;
  StmtKind kind = StmtKind::Other;
  /// LocalDecl only: simple declared type and the single declared name.
  std::string type_name;
  std::string var_name;
  /// LocalDecl initializer, ExprStmt expression, Return value.
  std::optional<Expr> expr;
  /// Source text of the statement (compound statements: header only),
  /// with line breaks folded to single spaces.
  std::string raw_text;
  /// Statements of the bodies of if/for/while/try/switch/... headers.
  std::vector<Statement> nested;

  /// Variables referenced by the statement; empty for Other.
  std::set<std::string> referenced_names() const;
};

struct Param {
  std::string type_name;
  std::string name;
};

struct MethodDecl {
  std::string name;
  std::vector<Param> params;
  /// Simple return type; "void" for void methods and constructors.
  std::string return_type;
  std::vector<Statement> body;
  int decl_line = 0;
  /// Declaration text up to the body, whitespace folded, e.g.
  /// "private Intent createIntent(String key, String value)".
  std::string signature;
};

struct ClassDecl {
  /// Dotted for nested types ("Outer.Inner"); anonymous class bodies and
  /// lambda bodies get synthetic names ("Outer$anon@42").
  std::string name;
  int line = 0;
  std::vector<MethodDecl> methods;
};

struct ParsedFile {
  SourceFile source;
  std::vector<ClassDecl> classes;
  std::vector<Diagnostic> parse_diagnostics;
};

/// Pre-order flattening of a statement list: each compound header is
/// followed by its nested statements.
std::vector<const Statement*> flatten(std::span<const Statement> statements);

/// "java.util.List<String>[]" -> "List[]".
std::string simple_type_name(std::string_view type);

} // namespace iccscan
