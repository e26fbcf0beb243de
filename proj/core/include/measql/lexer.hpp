#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace measql {

enum class TokenKind { Identifier, QuotedIdentifier, Integer, Decimal, String, Symbol, End };

struct Token {
   TokenKind kind;
   /// Identifier text, literal body (unescaped for strings) or symbol
   std::string text;
   unsigned line = 1;
   unsigned column = 1;

   bool isSymbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
   /// Case-insensitive keyword test; quoted identifiers never match
   bool isWord(std::string_view word) const;
   std::string describe() const;
};

/// Splits SQL text into tokens, skipping whitespace and comments. Throws SyntaxError.
std::vector<Token> tokenize(std::string_view text);

}
