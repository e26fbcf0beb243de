#include "measql/lexer.hpp"

#include "measql/error.hpp"
#include "measql/names.hpp"

#include <cctype>

namespace measql {

bool Token::isWord(std::string_view word) const {
   return kind == TokenKind::Identifier && iequals(text, word);
}

std::string Token::describe() const {
   switch (kind) {
      case TokenKind::End: return "end of input";
      case TokenKind::String: return "'" + text + "'";
      case TokenKind::QuotedIdentifier: return "\"" + text + "\"";
      default: return "'" + text + "'";
   }
}

namespace {

class Lexer {
   public:
   explicit Lexer(std::string_view text) : text_(text) {}

   std::vector<Token> run() {
      std::vector<Token> tokens;
      while (true) {
         skipTrivia();
         Token t{TokenKind::End, "", line_, column_};
         if (pos_ >= text_.size()) {
            tokens.push_back(t);
            return tokens;
         }
         char c = text_[pos_];
         if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '$')) advance();
            t.kind = TokenKind::Identifier;
            t.text = std::string(text_.substr(start, pos_ - start));
         } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            lexNumber(t);
         } else if (c == '\'') {
            t.kind = TokenKind::String;
            t.text = lexQuoted('\'', t);
         } else if (c == '"') {
            t.kind = TokenKind::QuotedIdentifier;
            t.text = lexQuoted('"', t);
         } else {
            t.kind = TokenKind::Symbol;
            static const char* twoChar[] = {"<>", "<=", ">=", "!="};
            bool matched = false;
            for (auto s : twoChar)
               if (text_.substr(pos_, 2) == s) {
                  t.text = s;
                  advance();
                  advance();
                  matched = true;
                  break;
               }
            if (!matched) {
               if (std::string_view("(),.;*+-/=<>").find(c) == std::string_view::npos)
                  throw SyntaxError(t.line, t.column, std::string("character '") + c + "'", {});
               t.text = std::string(1, c);
               advance();
            }
            if (t.text == "!=") t.text = "<>";
         }
         tokens.push_back(std::move(t));
      }
   }

   private:
   void advance() {
      if (text_[pos_] == '\n') {
         ++line_;
         column_ = 1;
      } else {
         ++column_;
      }
      ++pos_;
   }

   void skipTrivia() {
      while (pos_ < text_.size()) {
         char c = text_[pos_];
         if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
         } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            while (pos_ < text_.size() && text_[pos_] != '\n') advance();
         } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
            unsigned line = line_, column = column_;
            advance();
            advance();
            while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) advance();
            if (pos_ + 1 >= text_.size()) throw SyntaxError(line, column, "unterminated comment", {});
            advance();
            advance();
         } else {
            return;
         }
      }
   }

   void lexNumber(Token& t) {
      size_t start = pos_;
      bool decimal = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
      if (pos_ < text_.size() && text_[pos_] == '.') {
         decimal = true;
         advance();
         while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
         size_t save = pos_;
         unsigned saveLine = line_, saveColumn = column_;
         advance();
         if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
         if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            decimal = true;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
         } else {
            pos_ = save;
            line_ = saveLine;
            column_ = saveColumn;
         }
      }
      t.kind = decimal ? TokenKind::Decimal : TokenKind::Integer;
      t.text = std::string(text_.substr(start, pos_ - start));
   }

   std::string lexQuoted(char quote, const Token& t) {
      std::string out;
      advance();
      while (true) {
         if (pos_ >= text_.size()) throw SyntaxError(t.line, t.column, "unterminated quoted text", {});
         char c = text_[pos_];
         advance();
         if (c == quote) {
            if (pos_ < text_.size() && text_[pos_] == quote) {
               out.push_back(quote);
               advance();
               continue;
            }
            return out;
         }
         out.push_back(c);
      }
   }

   std::string_view text_;
   size_t pos_ = 0;
   unsigned line_ = 1;
   unsigned column_ = 1;
};

}

std::vector<Token> tokenize(std::string_view text) {
   return Lexer(text).run();
}

}
