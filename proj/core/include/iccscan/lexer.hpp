#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "iccscan/source.hpp"

namespace iccscan {

enum class TokenKind {
  Identifier, // identifiers and keywords alike
  Number,
  String,     // string literal or text block, quotes included
  Char,       // character literal, quotes included
  Punct,      // operators and separators
  Other,      // bytes the lexer does not recognize
};

struct Token {
  TokenKind kind = TokenKind::Other;
  std::string lexeme;
  int line = 1;
  /// Byte offset of the first character of `lexeme` in the input.
  std::size_t offset = 0;

  bool is(std::string_view text) const {
    return kind != TokenKind::String && kind != TokenKind::Char &&
           lexeme == text;
  }
};

struct TokenStream {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
};

/// Splits Java source text into tokens. Whitespace and comments are
/// dropped; everything else is covered by exactly one token, so the input
/// can be rebuilt from the lexemes and the gaps between their offsets.
///
/// `>` is always emitted as a single-character token so that nested
/// generic closers (`List<List<T>>`) need no special handling; the parser
/// reassembles shift operators from adjacent tokens.
TokenStream tokenize(std::string_view text);

} // namespace iccscan
