#include "iccscan/ast.hpp"

namespace iccscan {

Expr::Expr(ExprKind kind, std::string text, std::vector<Expr> children,
           bool has_receiver)
    : kind_(kind),
      text_(std::move(text)),
      children_(std::move(children)),
      has_receiver_(has_receiver) {
  switch (kind_) {
    case ExprKind::Name:
      names_.insert(text_);
      break;
    case ExprKind::StringLit:
    case ExprKind::Literal:
    case ExprKind::Other:
      break;
    default:
      for (const Expr& child : children_) {
        names_.insert(child.names_.begin(), child.names_.end());
      }
      break;
  }
}

Expr Expr::make_new(std::string type, std::vector<Expr> args) {
  return Expr(ExprKind::New, std::move(type), std::move(args), false);
}

Expr Expr::make_call(std::optional<Expr> receiver, std::string method,
                     std::vector<Expr> args) {
  std::vector<Expr> children;
  children.reserve(args.size() + 1);
  const bool has_receiver = receiver.has_value();
  if (has_receiver) {
    children.push_back(std::move(*receiver));
  }
  for (Expr& arg : args) {
    children.push_back(std::move(arg));
  }
  return Expr(ExprKind::Call, std::move(method), std::move(children),
              has_receiver);
}

Expr Expr::make_name(std::string identifier) {
  return Expr(ExprKind::Name, std::move(identifier), {}, false);
}

Expr Expr::make_field_access(Expr receiver, std::string field) {
  std::vector<Expr> children;
  children.push_back(std::move(receiver));
  return Expr(ExprKind::FieldAccess, std::move(field), std::move(children),
              true);
}

Expr Expr::make_cast(std::string type, Expr operand) {
  std::vector<Expr> children;
  children.push_back(std::move(operand));
  return Expr(ExprKind::Cast, std::move(type), std::move(children), false);
}

Expr Expr::make_string(std::string value) {
  return Expr(ExprKind::StringLit, std::move(value), {}, false);
}

Expr Expr::make_literal(std::string text) {
  return Expr(ExprKind::Literal, std::move(text), {}, false);
}

Expr Expr::make_assign(Expr target, Expr value) {
  std::vector<Expr> children;
  children.push_back(std::move(target));
  children.push_back(std::move(value));
  return Expr(ExprKind::Assign, "=", std::move(children), false);
}

Expr Expr::make_compound(std::string op, std::vector<Expr> operands) {
  return Expr(ExprKind::Compound, std::move(op), std::move(operands), false);
}

Expr Expr::make_other(std::string raw) {
  return Expr(ExprKind::Other, std::move(raw), {}, false);
}

const Expr* Expr::receiver() const noexcept {
  if (has_receiver_ && !children_.empty()) {
    return &children_.front();
  }
  return nullptr;
}

std::span<const Expr> Expr::args() const noexcept {
  if (kind_ != ExprKind::New && kind_ != ExprKind::Call) {
    return {};
  }
  std::span<const Expr> all(children_);
  return has_receiver_ ? all.subspan(1) : all;
}

std::set<std::string> Statement::referenced_names() const {
  if (kind == StmtKind::Other || !expr) {
    return {};
  }
  return expr->referenced_names();
}

namespace {

void flatten_into(std::span<const Statement> statements,
                  std::vector<const Statement*>& out) {
  for (const Statement& s : statements) {
    out.push_back(&s);
    flatten_into(s.nested, out);
  }
}

} // namespace

std::vector<const Statement*> flatten(std::span<const Statement> statements) {
  std::vector<const Statement*> out;
  flatten_into(statements, out);
  return out;
}

std::string simple_type_name(std::string_view type) {
  std::string stripped;
  int depth = 0;
  for (char c : type) {
    if (c == '<') {
      ++depth;
    } else if (c == '>') {
      --depth;
    } else if (depth == 0 && c != ' ' && c != '\t' && c != '\n') {
      stripped.push_back(c);
    }
  }
  std::size_t dims = 0;
  while (stripped.size() >= 2 && stripped.ends_with("[]")) {
    stripped.resize(stripped.size() - 2);
    ++dims;
  }
  if (stripped.ends_with("...")) {
    stripped.resize(stripped.size() - 3);
    ++dims;
  }
  if (const auto dot = stripped.rfind('.'); dot != std::string::npos) {
    stripped.erase(0, dot + 1);
  }
  for (std::size_t i = 0; i < dims; ++i) {
    stripped += "[]";
  }
  return stripped;
}

} // namespace iccscan
