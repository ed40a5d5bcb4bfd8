#include "iccscan/parser.hpp"

#include <algorithm>
#include <array>
#include <string_view>

#include "iccscan/lexer.hpp"

namespace iccscan {
namespace {

constexpr auto kPrimitives = std::to_array<std::string_view>({
    "boolean", "byte", "char", "short", "int", "long", "float", "double"});

constexpr auto kReserved = std::to_array<std::string_view>({
    "abstract", "assert",     "boolean",   "break",      "byte",
    "case",     "catch",      "char",      "class",      "const",
    "continue", "default",    "do",        "double",     "else",
    "enum",     "extends",    "final",     "finally",    "float",
    "for",      "goto",       "if",        "implements", "import",
    "instanceof", "int",      "interface", "long",       "native",
    "new",      "package",    "private",   "protected",  "public",
    "return",   "short",      "static",    "strictfp",   "super",
    "switch",   "synchronized", "this",    "throw",      "throws"});

constexpr auto kMoreReserved = std::to_array<std::string_view>({
    "transient", "try", "void", "volatile", "while", "true", "false", "null"});

constexpr auto kModifiers = std::to_array<std::string_view>({
    "public",   "private",  "protected", "static",    "final",
    "abstract", "native",   "synchronized", "transient", "volatile",
    "strictfp", "default"});

constexpr auto kAssignOps = std::to_array<std::string_view>({
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="});

constexpr int kMaxDepth = 200;

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view s) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

bool is_primitive(std::string_view s) { return contains(kPrimitives, s); }

bool is_reserved(std::string_view s) {
  return contains(kReserved, s) || contains(kMoreReserved, s);
}

int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof")
    return 7;
  if (op == "<<" || op == ">>" || op == ">>>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  return 0;
}

std::string fold_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n' || c == '\r') {
      while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) {
        out.pop_back();
      }
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                                 text[i] == '\n' || text[i] == '\r')) {
        ++i;
      }
      out.push_back(' ');
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string unquote(std::string_view lexeme) {
  if (lexeme.starts_with("\"\"\"")) {
    lexeme.remove_prefix(3);
    if (lexeme.ends_with("\"\"\"")) {
      lexeme.remove_suffix(3);
    }
    return std::string(lexeme);
  }
  if (!lexeme.empty() && lexeme.front() == '"') {
    lexeme.remove_prefix(1);
  }
  if (!lexeme.empty() && lexeme.back() == '"') {
    lexeme.remove_suffix(1);
  }
  return std::string(lexeme);
}

struct ParseError {
  std::string message;
};

class Parser {
  struct Counters {
    int anonymous = 0;
    int lambda = 0;
  };

 public:
  explicit Parser(const SourceFile& source) {
    out_.source = source;
    text_ = sanitize_utf8(source.text, out_.parse_diagnostics);
    TokenStream stream = tokenize(text_);
    toks_ = std::move(stream.tokens);
    lex_diagnostics_ = std::move(stream.diagnostics);
    eof_.kind = TokenKind::Other;
    eof_.offset = text_.size();
    eof_.line = toks_.empty() ? 1 : toks_.back().line;
  }

  ParsedFile run() {
    while (!at_eof()) {
      const std::size_t start = pos_;
      if (at("package") || at("import")) {
        skip_past(";");
      } else if (looks_like_type_decl()) {
        try {
          parse_type_decl("");
        } catch (const ParseError& e) {
          add_diag(toks_[start].line, "unparsed type declaration: " + e.message);
          pos_ = start + 1;
        }
      } else {
        advance();
      }
      if (pos_ == start) {
        advance();
      }
    }

    if (out_.classes.empty()) {
      const std::size_t suppressed =
          out_.parse_diagnostics.size() + lex_diagnostics_.size();
      std::string message = "no class declaration found";
      if (suppressed > 0) {
        message += " (" + std::to_string(suppressed) +
                   " diagnostics suppressed)";
      }
      out_.parse_diagnostics.clear();
      out_.parse_diagnostics.push_back({0, std::move(message)});
      return std::move(out_);
    }

    out_.parse_diagnostics.insert(out_.parse_diagnostics.end(),
                                  lex_diagnostics_.begin(),
                                  lex_diagnostics_.end());
    std::stable_sort(out_.parse_diagnostics.begin(),
                     out_.parse_diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return a.line < b.line;
                     });
    std::stable_sort(out_.classes.begin(), out_.classes.end(),
                     [](const ClassDecl& a, const ClassDecl& b) {
                       return a.line < b.line;
                     });
    return std::move(out_);
  }

 private:
  // ---- token access -------------------------------------------------------

  const Token& tok(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof_;
  }
  bool at_eof() const { return pos_ >= toks_.size(); }
  bool at(std::string_view s, std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() && tok(ahead).is(s);
  }
  bool at_ident(std::size_t ahead = 0) const {
    const Token& t = tok(ahead);
    return pos_ + ahead < toks_.size() && t.kind == TokenKind::Identifier &&
           !is_reserved(t.lexeme);
  }
  const Token& advance() {
    const Token& t = tok();
    if (!at_eof()) {
      ++pos_;
    }
    return t;
  }
  bool accept(std::string_view s) {
    if (at(s)) {
      advance();
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!accept(s)) {
      throw ParseError{"expected '" + std::string(s) + "' but found '" +
                       (at_eof() ? std::string("end of file") : tok().lexeme) +
                       "'"};
    }
  }
  std::string expect_ident() {
    if (!at_ident()) {
      throw ParseError{"expected identifier but found '" +
                       (at_eof() ? std::string("end of file") : tok().lexeme) +
                       "'"};
    }
    return advance().lexeme;
  }

  // Tokens `pos_+a` and `pos_+b` touch each other in the source.
  bool adjacent(std::size_t a, std::size_t b) const {
    const Token& x = tok(a);
    const Token& y = tok(b);
    return pos_ + b < toks_.size() && x.offset + x.lexeme.size() == y.offset;
  }

  void add_diag(int line, std::string message) {
    out_.parse_diagnostics.push_back({line, std::move(message)});
  }

  // Source text of tokens [first, last], line breaks folded.
  std::string raw(std::size_t first, std::size_t last) const {
    if (first >= toks_.size() || last < first) {
      return {};
    }
    last = std::min(last, toks_.size() - 1);
    const std::size_t begin = toks_[first].offset;
    const std::size_t end = toks_[last].offset + toks_[last].lexeme.size();
    return fold_whitespace(std::string_view(text_).substr(begin, end - begin));
  }

  struct DepthGuard {
    explicit DepthGuard(int& depth) : depth_(depth) {
      if (++depth_ > kMaxDepth) {
        --depth_;
        throw ParseError{"nesting too deep"};
      }
    }
    ~DepthGuard() { --depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;
    int& depth_;
  };

  // ---- skipping -----------------------------------------------------------

  // At an opening bracket: consume through its matching closer.
  void skip_balanced() {
    const std::string open = tok().lexeme;
    const std::string close = open == "(" ? ")" : open == "[" ? "]" : open == "{" ? "}" : ">";
    int depth = 0;
    while (!at_eof()) {
      if (at(open)) {
        ++depth;
      } else if (at(close)) {
        --depth;
        if (depth == 0) {
          advance();
          return;
        }
      }
      advance();
    }
  }

  void skip_past(std::string_view terminator) {
    while (!at_eof() && !at(terminator)) {
      advance();
    }
    accept(terminator);
  }

  // Statement recovery: through the next ';' at depth 0, or a whole
  // '{...}' block, stopping before an unmatched '}'.
  void recover() {
    int depth = 0;
    while (!at_eof()) {
      if (at("(") || at("[")) {
        ++depth;
      } else if ((at(")") || at("]")) && depth > 0) {
        --depth;
      } else if (at("{")) {
        skip_balanced();
        if (depth == 0 && !at(")") && !at(",") && !at(";") && !at(".")) {
          return;
        }
        continue;
      } else if (at("}")) {
        return;
      } else if (at(";") && depth == 0) {
        advance();
        return;
      }
      advance();
    }
  }

  bool skip_annotation() {
    if (!at("@") || at("interface", 1)) {
      return false;
    }
    advance();
    while (at_ident() || at(".")) {
      advance();
    }
    if (at("(")) {
      skip_balanced();
    }
    return true;
  }

  void skip_annotations() {
    while (skip_annotation()) {
    }
  }

  // At '<': skip a type-argument or type-parameter list. Fails (restoring
  // position) when the tokens cannot belong to a type.
  bool skip_type_args() {
    const std::size_t save = pos_;
    int depth = 0;
    while (!at_eof()) {
      const Token& t = tok();
      if (t.is("<")) {
        ++depth;
      } else if (t.is(">")) {
        if (--depth == 0) {
          advance();
          return true;
        }
      } else if (!(t.kind == TokenKind::Identifier || t.is(".") ||
                   t.is(",") || t.is("?") || t.is("[") || t.is("]") ||
                   t.is("&") || t.is("@"))) {
        break;
      }
      advance();
    }
    pos_ = save;
    return false;
  }

  // ---- types --------------------------------------------------------------

  // Parses a type and returns its simple name, or restores the position and
  // returns nullopt.
  std::optional<std::string> try_parse_type() {
    const std::size_t save = pos_;
    skip_annotations();
    std::string last;
    if (at_eof() || tok().kind != TokenKind::Identifier) {
      pos_ = save;
      return std::nullopt;
    }
    if (is_primitive(tok().lexeme) || at("void")) {
      last = advance().lexeme;
    } else if (at_ident()) {
      last = advance().lexeme;
      if (at("<") && !skip_type_args()) {
        pos_ = save;
        return std::nullopt;
      }
      while (at(".") && (at_ident(1) || at("@", 1))) {
        advance();
        skip_annotations();
        last = expect_ident_or_restore(save);
        if (last.empty()) {
          return std::nullopt;
        }
        if (at("<") && !skip_type_args()) {
          pos_ = save;
          return std::nullopt;
        }
      }
    } else {
      pos_ = save;
      return std::nullopt;
    }
    while (at("[") && at("]", 1)) {
      advance();
      advance();
      last += "[]";
    }
    return last;
  }

  std::string expect_ident_or_restore(std::size_t save) {
    if (!at_ident()) {
      pos_ = save;
      return {};
    }
    return advance().lexeme;
  }

  std::string parse_type() {
    auto type = try_parse_type();
    if (!type) {
      throw ParseError{"expected type but found '" + tok().lexeme + "'"};
    }
    return *type;
  }

  // ---- declarations -------------------------------------------------------

  bool looks_like_type_decl() const {
    std::size_t k = 0;
    while (pos_ + k < toks_.size()) {
      const Token& t = tok(k);
      if (t.is("@") && !tok(k + 1).is("interface")) {
        ++k;
        while (tok(k).kind == TokenKind::Identifier || tok(k).is(".")) {
          ++k;
        }
        if (tok(k).is("(")) {
          int depth = 0;
          while (pos_ + k < toks_.size()) {
            if (tok(k).is("(")) ++depth;
            if (tok(k).is(")") && --depth == 0) break;
            ++k;
          }
          ++k;
        }
        continue;
      }
      if (contains(kModifiers, t.lexeme) || t.is("sealed")) {
        ++k;
        continue;
      }
      break;
    }
    const Token& t = tok(k);
    if (t.is("class") || t.is("interface") || t.is("enum")) {
      return true;
    }
    if (t.is("@") && tok(k + 1).is("interface")) {
      return true;
    }
    return t.is("record") && tok(k + 1).kind == TokenKind::Identifier &&
           (tok(k + 2).is("(") || tok(k + 2).is("<"));
  }

  void skip_modifiers() {
    while (!at_eof()) {
      if (skip_annotation()) {
        continue;
      }
      if (contains(kModifiers, tok().lexeme) || at("sealed")) {
        advance();
        continue;
      }
      break;
    }
  }

  void parse_type_decl(const std::string& outer) {
    skip_modifiers();
    const int line = tok().line;
    std::string kind;
    if (accept("@")) {
      kind = "interface";
      expect("interface");
    } else {
      kind = advance().lexeme;
    }
    const std::string name = expect_ident();
    ClassDecl cls;
    cls.name = outer.empty() ? name : outer + "." + name;
    cls.line = line;
    while (!at_eof() && !at("{")) {
      if (at("(") || at("<")) {
        skip_balanced();
      } else {
        advance();
      }
    }
    class_stack_.push_back(cls.name);
    if (kind == "enum") {
      parse_enum_body(cls);
    } else {
      parse_class_body(cls);
    }
    class_stack_.pop_back();
    out_.classes.push_back(std::move(cls));
  }

  void parse_enum_body(ClassDecl& cls) {
    expect("{");
    while (!at_eof() && !at(";") && !at("}")) {
      skip_annotations();
      if (at_ident()) {
        advance();
        if (at("(")) {
          skip_balanced();
        }
        if (at("{")) {
          parse_anonymous_body(tok().line);
        }
      }
      if (!accept(",")) {
        if (!at(";") && !at("}")) {
          recover();
        }
        break;
      }
    }
    accept(";");
    parse_members(cls);
  }

  void parse_class_body(ClassDecl& cls) {
    expect("{");
    parse_members(cls);
  }

  void parse_members(ClassDecl& cls) {
    while (!at_eof() && !at("}")) {
      const std::size_t start = pos_;
      try {
        parse_member(cls);
      } catch (const ParseError& e) {
        add_diag(toks_[std::min(start, toks_.size() - 1)].line,
                 "unparsed member: " + e.message);
        pos_ = start;
        recover();
      }
      if (pos_ == start) {
        advance();
      }
    }
    if (!accept("}")) {
      add_diag(eof_.line, "unterminated class body for " + cls.name);
    }
  }

  void parse_member(ClassDecl& cls) {
    if (accept(";")) {
      return;
    }
    skip_annotations();
    const std::size_t member_start = pos_;
    if (at("{") || (at("static") && at("{", 1))) {
      MethodDecl init;
      init.name = at("static") ? "<static-init>" : "<init-block>";
      init.return_type = "void";
      init.decl_line = tok().line;
      init.signature = at("static") ? "static" : "";
      accept("static");
      parse_block(init.body);
      cls.methods.push_back(std::move(init));
      return;
    }
    if (looks_like_type_decl()) {
      parse_type_decl(cls.name);
      return;
    }
    skip_modifiers();
    if (at("<")) {
      skip_balanced();
    }

    const std::string simple_class =
        cls.name.substr(cls.name.rfind('.') == std::string::npos
                            ? 0
                            : cls.name.rfind('.') + 1);
    MethodDecl method;
    method.decl_line = toks_[member_start].line;
    if (at_ident() && (at("(", 1) || (at("{", 1) && tok().lexeme == simple_class))) {
      method.name = advance().lexeme;
      method.return_type = "void";
    } else {
      method.return_type = parse_type();
      const std::string name = expect_ident();
      if (!at("(")) {
        parse_field_rest();
        return;
      }
      method.name = name;
    }

    if (at("(")) {
      parse_params(method);
    }
    while (at("[") && at("]", 1)) {
      advance();
      advance();
    }
    if (accept("throws")) {
      parse_type();
      while (accept(",")) {
        parse_type();
      }
    }
    method.signature = raw(member_start, pos_ - 1);
    if (at("{")) {
      parse_block(method.body);
    } else if (accept("default")) {
      skip_past(";");
    } else {
      expect(";");
    }
    cls.methods.push_back(std::move(method));
  }

  void parse_params(MethodDecl& method) {
    expect("(");
    while (!at(")")) {
      skip_annotations();
      while (accept("final")) {
        skip_annotations();
      }
      Param p;
      p.type_name = parse_type();
      if (accept("...")) {
        p.type_name += "[]";
      }
      skip_annotations();
      if (at("this")) {
        advance();
        p.name = "this";
      } else {
        p.name = expect_ident();
      }
      while (at("[") && at("]", 1)) {
        advance();
        advance();
        p.type_name += "[]";
      }
      method.params.push_back(std::move(p));
      if (!accept(",")) {
        break;
      }
    }
    expect(")");
  }

  void parse_field_rest() {
    // Field initializers are parsed only so that anonymous classes and
    // lambdas inside them get registered.
    while (true) {
      while (at("[") && at("]", 1)) {
        advance();
        advance();
      }
      if (accept("=")) {
        if (at("{")) {
          parse_array_initializer();
        } else {
          parse_expr();
        }
      }
      if (!accept(",")) {
        break;
      }
      expect_ident();
    }
    expect(";");
  }

  // ---- statements ---------------------------------------------------------

  void parse_block(std::vector<Statement>& out) {
    DepthGuard guard(depth_);
    expect("{");
    while (!at_eof() && !at("}")) {
      const std::size_t start = pos_;
      parse_statement(out);
      if (pos_ == start) {
        advance();
      }
    }
    if (!accept("}")) {
      add_diag(eof_.line, "unterminated block");
    }
  }

  void parse_body(std::vector<Statement>& out) {
    if (at("{")) {
      parse_block(out);
    } else {
      parse_statement(out);
    }
  }

  Statement header(std::size_t first, std::size_t last) const {
    Statement s;
    s.line = toks_[first].line;
    s.kind = StmtKind::Other;
    s.raw_text = raw(first, last);
    return s;
  }

  void parse_statement(std::vector<Statement>& out) {
    const std::size_t start = pos_;
    std::vector<Statement> parsed;
    try {
      DepthGuard guard(depth_);
      parse_statement_inner(parsed);
    } catch (const ParseError& e) {
      pos_ = start;
      recover();
      if (pos_ == start) {
        advance();
      }
      Statement s = header(start, pos_ - 1);
      add_diag(s.line, "unparsed statement: " + e.message);
      out.push_back(std::move(s));
      return;
    }
    for (Statement& s : parsed) {
      out.push_back(std::move(s));
    }
  }

  // Parenthesized header: parse the expression so that lambdas and
  // anonymous classes inside it are registered; fall back to skipping.
  void parse_paren_header() {
    if (!at("(")) {
      throw ParseError{"expected '('"};
    }
    const std::size_t save = pos_;
    try {
      advance();
      parse_expr();
      expect(")");
    } catch (const ParseError&) {
      pos_ = save;
      skip_balanced();
    }
  }

  void parse_statement_inner(std::vector<Statement>& out) {
    const std::size_t start = pos_;
    if (accept(";")) {
      return;
    }
    if (at("{")) {
      parse_block(out);
      return;
    }
    if (at("if")) {
      advance();
      parse_paren_header();
      Statement s = header(start, pos_ - 1);
      parse_body(s.nested);
      out.push_back(std::move(s));
      if (at("else")) {
        const std::size_t else_pos = pos_;
        advance();
        Statement e = header(else_pos, else_pos);
        parse_body(e.nested);
        out.push_back(std::move(e));
      }
      return;
    }
    if (at("for") || at("while") || at("synchronized")) {
      advance();
      if (!at("(")) {
        throw ParseError{"expected '('"};
      }
      skip_balanced();
      Statement s = header(start, pos_ - 1);
      parse_body(s.nested);
      out.push_back(std::move(s));
      return;
    }
    if (at("do")) {
      advance();
      Statement s = header(start, start);
      parse_body(s.nested);
      expect("while");
      if (!at("(")) {
        throw ParseError{"expected '('"};
      }
      skip_balanced();
      expect(";");
      out.push_back(std::move(s));
      return;
    }
    if (at("try")) {
      parse_try(out);
      return;
    }
    if (at("switch")) {
      parse_switch(out);
      return;
    }
    if (at("return")) {
      advance();
      Statement s;
      s.line = toks_[start].line;
      s.kind = StmtKind::Return;
      const Counters before = counters_;
      if (!at(";")) {
        s.expr = parse_expr();
      }
      expect(";");
      s.raw_text = raw(start, pos_ - 1);
      finish_simple(std::move(s), before, out);
      return;
    }
    if (at("throw") || at("break") || at("continue") || at("assert") ||
        (at("yield") && !at("=", 1) && !at(".", 1) && !at("(", 1))) {
      const Counters before = counters_;
      advance();
      if (!at(";") && !at(":")) {
        if (at_ident() && at(";", 1)) {
          advance();
        } else {
          parse_expr();
        }
      }
      if (accept(":")) {
        parse_expr();
      }
      expect(";");
      Statement s = header(start, pos_ - 1);
      finish_simple(std::move(s), before, out);
      return;
    }
    if (at_ident() && at(":", 1)) {
      advance();
      advance();
      parse_statement_inner(out);
      return;
    }
    if (looks_like_local_type_decl()) {
      const std::size_t name_pos = pos_;
      parse_type_decl(class_stack_.empty() ? "" : class_stack_.back());
      Statement s = header(name_pos, name_pos);
      s.raw_text = "class " + out_.classes.back().name;
      add_diag(s.line, "local type declaration analyzed as a separate class");
      out.push_back(std::move(s));
      return;
    }
    if (parse_local_decl(out)) {
      return;
    }
    const Counters before = counters_;
    Statement s;
    s.line = toks_[start].line;
    s.kind = StmtKind::ExprStmt;
    s.expr = parse_expr();
    expect(";");
    s.raw_text = raw(start, pos_ - 1);
    finish_simple(std::move(s), before, out);
  }

  bool looks_like_local_type_decl() const {
    std::size_t k = 0;
    while (tok(k).is("final") || tok(k).is("abstract") || tok(k).is("static")) {
      ++k;
    }
    const Token& t = tok(k);
    if (t.is("class") || t.is("interface") || t.is("enum")) {
      return tok(k + 1).kind == TokenKind::Identifier;
    }
    return t.is("record") && tok(k + 1).kind == TokenKind::Identifier &&
           tok(k + 2).is("(");
  }

  // Statements whose expressions contained an anonymous class body become
  // Other; lambdas keep the statement but add a diagnostic.
  void finish_simple(Statement s, const Counters& before,
                     std::vector<Statement>& out) {
    if (counters_.anonymous != before.anonymous) {
      add_diag(s.line, "statement contains an anonymous class; its body is "
                       "analyzed as a separate class");
      s.kind = StmtKind::Other;
      s.expr.reset();
      s.type_name.clear();
      s.var_name.clear();
    } else if (counters_.lambda != before.lambda) {
      add_diag(s.line, "lambda body analyzed as a separate method");
    }
    out.push_back(std::move(s));
  }

  bool parse_local_decl(std::vector<Statement>& out) {
    const std::size_t start = pos_;
    skip_annotations();
    while (accept("final")) {
      skip_annotations();
    }
    auto type = try_parse_type();
    if (!type || *type == "void" || !at_ident() ||
        !(at("=", 1) || at(";", 1) || at(",", 1) || at("[", 1))) {
      pos_ = start;
      return false;
    }

    const Counters before = counters_;
    std::vector<Statement> decls;
    while (true) {
      Statement s;
      s.line = toks_[start].line;
      s.kind = StmtKind::LocalDecl;
      s.type_name = *type;
      s.var_name = expect_ident();
      while (at("[") && at("]", 1)) {
        advance();
        advance();
        s.type_name += "[]";
      }
      if (accept("=")) {
        s.expr = at("{") ? parse_array_initializer() : parse_expr();
      }
      decls.push_back(std::move(s));
      if (!accept(",")) {
        break;
      }
    }
    expect(";");
    const std::string text = raw(start, pos_ - 1);
    if (counters_.anonymous != before.anonymous) {
      Statement s = header(start, pos_ - 1);
      finish_simple(std::move(s), before, out);
      return true;
    }
    for (Statement& s : decls) {
      s.raw_text = text;
      finish_simple(std::move(s), before, out);
    }
    return true;
  }

  void parse_try(std::vector<Statement>& out) {
    const std::size_t start = pos_;
    expect("try");
    if (at("(")) {
      skip_balanced();
    }
    Statement s = header(start, pos_ - 1);
    parse_block(s.nested);
    out.push_back(std::move(s));
    while (at("catch")) {
      const std::size_t catch_pos = pos_;
      advance();
      if (!at("(")) {
        throw ParseError{"expected '(' after catch"};
      }
      skip_balanced();
      Statement c = header(catch_pos, pos_ - 1);
      parse_block(c.nested);
      out.push_back(std::move(c));
    }
    if (at("finally")) {
      const std::size_t fin_pos = pos_;
      advance();
      Statement f = header(fin_pos, fin_pos);
      parse_block(f.nested);
      out.push_back(std::move(f));
    }
  }

  void parse_switch(std::vector<Statement>& out) {
    const std::size_t start = pos_;
    expect("switch");
    parse_paren_header();
    Statement s = header(start, pos_ - 1);
    expect("{");
    while (!at_eof() && !at("}")) {
      if (at("case") || at("default")) {
        // Label through ':' or '->' at depth 0.
        int depth = 0;
        while (!at_eof()) {
          if (at("(")) ++depth;
          if (at(")")) --depth;
          if (depth == 0 && (at(":") || at("->"))) {
            break;
          }
          advance();
        }
        const bool arrow = at("->");
        advance();
        if (arrow && !at("{") && !at("throw")) {
          const std::size_t expr_start = pos_;
          const Counters before = counters_;
          Statement e;
          e.line = tok().line;
          e.kind = StmtKind::ExprStmt;
          e.expr = parse_expr();
          expect(";");
          e.raw_text = raw(expr_start, pos_ - 1);
          finish_simple(std::move(e), before, s.nested);
        }
        continue;
      }
      const std::size_t before = pos_;
      parse_statement(s.nested);
      if (pos_ == before) {
        advance();
      }
    }
    expect("}");
    out.push_back(std::move(s));
  }

  // ---- expressions --------------------------------------------------------

  Expr parse_expr() {
    DepthGuard guard(depth_);
    return parse_assignment();
  }

  // Reads an assignment operator at the cursor (reassembling '>' runs).
  // Returns the operator and its token count, or {"", 0}.
  std::pair<std::string, std::size_t> peek_assign_op() const {
    if (at(">") && adjacent(0, 1) && at(">", 1)) {
      if (adjacent(1, 2) && at(">", 2) && adjacent(2, 3) && at("=", 3)) {
        return {">>>=", 4};
      }
      if (adjacent(1, 2) && at("=", 2)) {
        return {">>=", 3};
      }
      return {"", 0};
    }
    const Token& t = tok();
    if (t.kind == TokenKind::Punct && contains(kAssignOps, t.lexeme)) {
      return {t.lexeme, 1};
    }
    return {"", 0};
  }

  std::pair<std::string, std::size_t> peek_binary_op() const {
    if (at(">")) {
      if (adjacent(0, 1) && at(">", 1)) {
        if (adjacent(1, 2) && at(">", 2)) {
          if (adjacent(2, 3) && at("=", 3)) return {"", 0};
          return {">>>", 3};
        }
        if (adjacent(1, 2) && at("=", 2)) return {"", 0};
        return {">>", 2};
      }
      if (adjacent(0, 1) && at("=", 1)) {
        return {">=", 2};
      }
      return {">", 1};
    }
    const Token& t = tok();
    if (t.kind == TokenKind::Identifier && t.lexeme == "instanceof") {
      return {"instanceof", 1};
    }
    if (t.kind == TokenKind::Punct && binary_precedence(t.lexeme) > 0) {
      return {t.lexeme, 1};
    }
    return {"", 0};
  }

  Expr parse_assignment() {
    Expr lhs = parse_ternary();
    const auto [op, width] = peek_assign_op();
    if (width == 0) {
      return lhs;
    }
    pos_ += width;
    Expr rhs = at("{") ? parse_array_initializer() : parse_assignment();
    if (op == "=") {
      return Expr::make_assign(std::move(lhs), std::move(rhs));
    }
    std::vector<Expr> operands;
    operands.push_back(std::move(lhs));
    operands.push_back(std::move(rhs));
    return Expr::make_compound(op, std::move(operands));
  }

  Expr parse_ternary() {
    Expr cond = parse_binary(1);
    if (!accept("?")) {
      return cond;
    }
    DepthGuard guard(depth_);
    Expr then = parse_ternary_branch();
    expect(":");
    Expr otherwise = parse_ternary_branch();
    std::vector<Expr> operands;
    operands.push_back(std::move(cond));
    operands.push_back(std::move(then));
    operands.push_back(std::move(otherwise));
    return Expr::make_compound("?:", std::move(operands));
  }

  Expr parse_ternary_branch() {
    if (is_lambda_start()) {
      return parse_lambda();
    }
    return parse_ternary();
  }

  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    while (true) {
      const auto [op, width] = peek_binary_op();
      if (width == 0) {
        break;
      }
      const int prec = binary_precedence(op);
      if (prec < min_prec) {
        break;
      }
      pos_ += width;
      std::vector<Expr> operands;
      operands.push_back(std::move(lhs));
      if (op == "instanceof") {
        accept("final");
        parse_type();
        if (at_ident()) {
          advance(); // pattern binding
        }
      } else {
        DepthGuard guard(depth_);
        operands.push_back(parse_binary(prec + 1));
      }
      lhs = Expr::make_compound(op, std::move(operands));
    }
    return lhs;
  }

  bool looks_like_cast() {
    if (!at("(")) {
      return false;
    }
    const std::size_t save = pos_;
    advance();
    auto type = try_parse_type();
    bool cast = false;
    if (type && at(")")) {
      const Token& next = tok(1);
      const std::string base = type->substr(0, type->find('['));
      if (is_primitive(base)) {
        cast = !next.is(".");
      } else if (pos_ + 1 < toks_.size()) {
        cast = (next.kind == TokenKind::Identifier && next.lexeme != "instanceof") ||
               next.kind == TokenKind::String || next.kind == TokenKind::Char ||
               next.kind == TokenKind::Number || next.is("(") || next.is("!") ||
               next.is("~");
      }
    }
    pos_ = save;
    return cast;
  }

  Expr parse_unary() {
    DepthGuard guard(depth_);
    if (at("+") || at("-") || at("!") || at("~") || at("++") || at("--")) {
      std::string op = advance().lexeme;
      std::vector<Expr> operands;
      operands.push_back(parse_unary());
      return Expr::make_compound(std::move(op), std::move(operands));
    }
    if (!is_lambda_start() && looks_like_cast()) {
      advance();
      std::string type = parse_type();
      expect(")");
      if (is_lambda_start()) {
        return Expr::make_cast(std::move(type), parse_lambda());
      }
      return Expr::make_cast(std::move(type), parse_unary());
    }
    return parse_postfix(parse_primary());
  }

  Expr parse_postfix(Expr current) {
    while (true) {
      if (at(".")) {
        advance();
        if (at("<")) {
          if (!skip_type_args()) {
            throw ParseError{"malformed type arguments"};
          }
        }
        if (at("new")) {
          current = parse_creation();
          continue;
        }
        if (at("class") || at("this") || at("super")) {
          current = Expr::make_field_access(std::move(current), advance().lexeme);
          continue;
        }
        std::string name = expect_ident();
        if (at("(")) {
          std::vector<Expr> args = parse_args();
          current = Expr::make_call(std::move(current), std::move(name),
                                    std::move(args));
        } else {
          current = Expr::make_field_access(std::move(current), std::move(name));
        }
        continue;
      }
      if (at("[")) {
        if (at("]", 1)) {
          advance();
          advance();
          continue;
        }
        advance();
        std::vector<Expr> operands;
        operands.push_back(std::move(current));
        operands.push_back(parse_expr());
        expect("]");
        current = Expr::make_compound("[]", std::move(operands));
        continue;
      }
      if (at("++") || at("--")) {
        std::string op = advance().lexeme;
        std::vector<Expr> operands;
        operands.push_back(std::move(current));
        current = Expr::make_compound(op + "(post)", std::move(operands));
        continue;
      }
      if (at("::")) {
        const std::size_t start = pos_;
        advance();
        if (!accept("new")) {
          expect_ident();
        }
        current = Expr::make_other(raw(start, pos_ - 1));
        continue;
      }
      return current;
    }
  }

  std::vector<Expr> parse_args() {
    expect("(");
    std::vector<Expr> args;
    while (!at(")")) {
      if (is_lambda_start()) {
        args.push_back(parse_lambda());
      } else {
        args.push_back(parse_expr());
      }
      if (!accept(",")) {
        break;
      }
    }
    expect(")");
    return args;
  }

  Expr parse_array_initializer() {
    DepthGuard guard(depth_);
    expect("{");
    std::vector<Expr> elements;
    while (!at("}")) {
      elements.push_back(at("{") ? parse_array_initializer() : parse_expr());
      if (!accept(",")) {
        break;
      }
    }
    expect("}");
    return Expr::make_compound("{}", std::move(elements));
  }

  Expr parse_creation() {
    expect("new");
    if (at("<")) {
      skip_type_args();
    }
    skip_annotations();
    std::string type;
    if (!at_eof() && (is_primitive(tok().lexeme) || at_ident())) {
      type = advance().lexeme;
    } else {
      throw ParseError{"expected type after 'new'"};
    }
    while (true) {
      if (at("<")) {
        if (!skip_type_args()) {
          throw ParseError{"malformed type arguments"};
        }
      }
      if (at(".") && at_ident(1)) {
        advance();
        type = advance().lexeme;
        continue;
      }
      break;
    }
    if (at("[")) {
      std::vector<Expr> dims;
      while (at("[")) {
        advance();
        if (!at("]")) {
          dims.push_back(parse_expr());
        }
        expect("]");
        type += "[]";
      }
      if (at("{")) {
        dims.push_back(parse_array_initializer());
      }
      return Expr::make_new(std::move(type), std::move(dims));
    }
    std::vector<Expr> args = parse_args();
    if (at("{")) {
      parse_anonymous_body(tok().line);
    }
    return Expr::make_new(std::move(type), std::move(args));
  }

  void parse_anonymous_body(int line) {
    const std::string outer = class_stack_.empty() ? "" : class_stack_.back();
    ClassDecl cls;
    cls.name = outer + "$anon@" + std::to_string(line);
    cls.line = line;
    ++counters_.anonymous;
    class_stack_.push_back(cls.name);
    parse_class_body(cls);
    class_stack_.pop_back();
    out_.classes.push_back(std::move(cls));
  }

  bool is_lambda_start() const {
    if (at_ident() && at("->", 1)) {
      return true;
    }
    if (!at("(")) {
      return false;
    }
    int depth = 0;
    for (std::size_t k = 0; pos_ + k < toks_.size(); ++k) {
      if (tok(k).is("(")) {
        ++depth;
      } else if (tok(k).is(")")) {
        if (--depth == 0) {
          return tok(k + 1).is("->");
        }
      } else if (tok(k).is(";") || tok(k).is("{") || tok(k).is("}")) {
        return false;
      }
    }
    return false;
  }

  Expr parse_lambda() {
    const std::size_t start = pos_;
    const int line = tok().line;
    if (at("(")) {
      skip_balanced();
    } else {
      advance();
    }
    const std::size_t arrow = pos_;
    expect("->");

    const std::string outer = class_stack_.empty() ? "" : class_stack_.back();
    ClassDecl cls;
    cls.name = outer + "$lambda@" + std::to_string(line);
    cls.line = line;
    MethodDecl method;
    method.name = "lambda@" + std::to_string(line);
    method.return_type = "var";
    method.decl_line = line;
    method.signature = raw(start, arrow);
    ++counters_.lambda;
    if (at("{")) {
      class_stack_.push_back(cls.name);
      parse_block(method.body);
      class_stack_.pop_back();
    } else {
      const std::size_t body_start = pos_;
      const Counters before = counters_;
      Statement s;
      s.line = tok().line;
      s.kind = StmtKind::ExprStmt;
      s.expr = parse_expr();
      s.raw_text = raw(body_start, pos_ - 1);
      if (counters_.anonymous != before.anonymous) {
        s.kind = StmtKind::Other;
        s.expr.reset();
      }
      method.body.push_back(std::move(s));
    }
    cls.methods.push_back(std::move(method));
    out_.classes.push_back(std::move(cls));
    return Expr::make_other(raw(start, pos_ - 1));
  }

  Expr parse_primary() {
    const Token& t = tok();
    if (at_eof()) {
      throw ParseError{"unexpected end of file in expression"};
    }
    if (is_lambda_start()) {
      return parse_lambda();
    }
    switch (t.kind) {
      case TokenKind::String:
        advance();
        return Expr::make_string(unquote(t.lexeme));
      case TokenKind::Char:
      case TokenKind::Number:
        advance();
        return Expr::make_literal(t.lexeme);
      case TokenKind::Other:
        throw ParseError{"unexpected character '" + t.lexeme + "'"};
      default:
        break;
    }
    if (at("(")) {
      advance();
      Expr inner = parse_expr();
      expect(")");
      return inner;
    }
    if (at("{")) {
      return parse_array_initializer();
    }
    if (at("new")) {
      return parse_creation();
    }
    if (at("switch")) {
      const std::size_t start = pos_;
      advance();
      parse_paren_header();
      if (!at("{")) {
        throw ParseError{"expected '{' after switch"};
      }
      skip_balanced();
      return Expr::make_other(raw(start, pos_ - 1));
    }
    if (at("this") || at("super")) {
      std::string word = advance().lexeme;
      if (at("(")) {
        return Expr::make_call(std::nullopt, std::move(word), parse_args());
      }
      return Expr::make_literal(std::move(word));
    }
    if (at("null") || at("true") || at("false")) {
      return Expr::make_literal(advance().lexeme);
    }
    if (t.kind == TokenKind::Identifier &&
        (is_primitive(t.lexeme) || t.lexeme == "void")) {
      std::string type = advance().lexeme;
      while (at("[") && at("]", 1)) {
        advance();
        advance();
        type += "[]";
      }
      expect(".");
      expect("class");
      return Expr::make_literal(type + ".class");
    }
    if (at_ident()) {
      std::string name = advance().lexeme;
      if (at("(")) {
        return Expr::make_call(std::nullopt, std::move(name), parse_args());
      }
      return Expr::make_name(std::move(name));
    }
    if (at("<")) {
      // Explicit generic invocation without receiver: <T>foo(...)
      if (skip_type_args() && at_ident()) {
        std::string name = advance().lexeme;
        return Expr::make_call(std::nullopt, std::move(name), parse_args());
      }
    }
    throw ParseError{"unexpected token '" + t.lexeme + "' in expression"};
  }

  std::string text_;
  std::vector<Token> toks_;
  std::vector<Diagnostic> lex_diagnostics_;
  Token eof_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  Counters counters_;
  std::vector<std::string> class_stack_;
  ParsedFile out_;
};

} // namespace

ParsedFile parse_file(const SourceFile& source) { return Parser(source).run(); }

} // namespace iccscan
