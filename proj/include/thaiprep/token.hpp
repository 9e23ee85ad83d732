#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thaiprep/unicode.hpp"

namespace thaiprep {

enum class TokenKind { word, special, count, emoji, english, unknown };

std::string_view to_string(TokenKind kind);

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::unknown;
  Span span;  // code point offsets into the normalized text

  bool operator==(const Token&) const = default;
};

/// Tokens plus the whitespace between them. `separators` has one more entry
/// than `tokens`: leading text, the gaps between tokens, trailing text. A
/// default-constructed stream is the empty text.
struct TokenStream {
  std::vector<Token> tokens;
  std::vector<std::string> separators;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

}  // namespace thaiprep
