#include "iccscan/lexer.hpp"

#include <array>

namespace iccscan {
namespace {

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Longest match first. No entry contains '>' except "->"; see tokenize().
constexpr std::array<std::string_view, 26> kOperators = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "<<", "{",  "}",
    "(",   ")",   "[",  "]",
};

constexpr std::string_view kSingles = ";,.@=<>!~?:+-*/&|^%";

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  TokenStream run() {
    while (pos_ < text_.size()) {
      const unsigned char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' ||
                 c == '\v') {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        skip_line_comment();
      } else if (c == '/' && peek(1) == '*') {
        skip_block_comment();
      } else if (is_ident_start(c)) {
        lex_identifier();
      } else if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
        lex_number();
      } else if (c == '"') {
        lex_string();
      } else if (c == '\'') {
        lex_char();
      } else {
        lex_punct();
      }
    }
    return std::move(out_);
  }

 private:
  unsigned char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size()
               ? static_cast<unsigned char>(text_[pos_ + ahead])
               : '\0';
  }

  void emit(TokenKind kind, std::size_t start, int start_line) {
    out_.tokens.push_back(Token{kind, std::string(text_.substr(start, pos_ - start)),
                                start_line, start});
  }

  void skip_line_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') {
      ++pos_;
    }
  }

  void skip_block_comment() {
    const int start_line = line_;
    pos_ += 2;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '*' && peek(1) == '/') {
        pos_ += 2;
        return;
      }
      if (text_[pos_] == '\n') {
        ++line_;
      }
      ++pos_;
    }
    out_.diagnostics.push_back({start_line, "unterminated block comment"});
  }

  void lex_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_part(text_[pos_])) {
      ++pos_;
    }
    emit(TokenKind::Identifier, start, line_);
  }

  void lex_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const unsigned char c = text_[pos_];
      if (is_ident_part(c) || c == '.') {
        // Exponent sign: 1e-5, 0x1p+3.
        if ((c == 'e' || c == 'E' || c == 'p' || c == 'P') &&
            (peek(1) == '+' || peek(1) == '-')) {
          const bool hex = pos_ - start > 1 && (text_[start + 1] == 'x' ||
                                                text_[start + 1] == 'X');
          if ((c == 'e' || c == 'E') != hex) {
            pos_ += 2;
            continue;
          }
        }
        ++pos_;
      } else {
        break;
      }
    }
    emit(TokenKind::Number, start, line_);
  }

  void lex_string() {
    const std::size_t start = pos_;
    const int start_line = line_;
    if (peek(1) == '"' && peek(2) == '"') {
      // Text block.
      pos_ += 3;
      while (pos_ < text_.size()) {
        if (text_[pos_] == '\\') {
          if (peek(1) == '\n') {
            ++line_;
          }
          pos_ += 2;
          continue;
        }
        if (text_[pos_] == '"' && peek(1) == '"' && peek(2) == '"') {
          pos_ += 3;
          emit(TokenKind::String, start, start_line);
          return;
        }
        if (text_[pos_] == '\n') {
          ++line_;
        }
        ++pos_;
      }
      pos_ = text_.size();
      out_.diagnostics.push_back({start_line, "unterminated text block"});
      emit(TokenKind::String, start, start_line);
      return;
    }
    lex_quoted('"', "unterminated string literal");
  }

  void lex_char() { lex_quoted('\'', "unterminated character literal"); }

  void lex_quoted(char quote, const char* unterminated) {
    const std::size_t start = pos_;
    ++pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] != '\n') {
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        break;
      }
      ++pos_;
      if (c == quote) {
        emit(quote == '"' ? TokenKind::String : TokenKind::Char, start, line_);
        return;
      }
    }
    out_.diagnostics.push_back({line_, unterminated});
    emit(quote == '"' ? TokenKind::String : TokenKind::Char, start, line_);
  }

  void lex_punct() {
    const std::size_t start = pos_;
    const std::string_view rest = text_.substr(pos_);
    for (std::string_view op : kOperators) {
      if (rest.starts_with(op)) {
        pos_ += op.size();
        emit(TokenKind::Punct, start, line_);
        return;
      }
    }
    if (kSingles.find(static_cast<char>(rest.front())) != std::string_view::npos) {
      ++pos_;
      emit(TokenKind::Punct, start, line_);
      return;
    }
    ++pos_;
    out_.diagnostics.push_back({line_, "unrecognized character"});
    emit(TokenKind::Other, start, line_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  TokenStream out_;
};

} // namespace

TokenStream tokenize(std::string_view text) { return Lexer(text).run(); }

} // namespace iccscan
