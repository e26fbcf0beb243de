#include "measql/parser.hpp"

#include "measql/error.hpp"
#include "measql/lexer.hpp"
#include "measql/names.hpp"

#include <charconv>

namespace measql {

using namespace ast;

static constexpr std::string_view reservedWords[] = {
   "ALL",   "AND",    "AS",      "ASC",  "BY",    "CASE",  "CREATE", "DESC",  "DISTINCT", "ELSE",  "END",   "EXISTS",
   "FALSE", "FROM",   "GROUP",   "HAVING", "IN",  "INNER", "IS",     "JOIN",  "LEFT",     "NOT",   "NULL",  "ON",
   "OR",    "ORDER",  "OUTER",   "OVER", "PARTITION", "SELECT", "SET", "TABLE", "THEN",   "TRUE",  "UNION", "USING",
   "VIEW",  "WHEN",   "WHERE",   "WITH",
};

static constexpr std::string_view contextualWords[] = {"AGGREGATE", "AT", "CURRENT", "DATE", "EVAL", "MEASURE", "ROLLUP", "VISIBLE"};

bool isReservedWord(std::string_view word) {
   for (auto w : reservedWords)
      if (iequals(w, word)) return true;
   return false;
}

bool isContextualWord(std::string_view word) {
   for (auto w : contextualWords)
      if (iequals(w, word)) return true;
   return false;
}

namespace {

class Parser {
   public:
   explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

   std::vector<Statement> parseScript() {
      std::vector<Statement> statements;
      while (true) {
         while (acceptSymbol(";")) {}
         if (peek().kind == TokenKind::End) break;
         statements.push_back(parseStatement());
         if (peek().kind != TokenKind::End) expectSymbol(";");
      }
      return statements;
   }

   Query parseSingleQuery() {
      Query q = parseQuery();
      while (acceptSymbol(";")) {}
      expectEnd();
      return q;
   }

   ExprPtr parseSingleExpression() {
      ExprPtr e = parseExpr();
      expectEnd();
      return e;
   }

   private:
   //------------------------------------------------------------------------
   // Token helpers

   const Token& peek(size_t ahead = 0) const {
      size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
      return tokens_[i];
   }
   const Token& next() {
      const Token& t = tokens_[pos_];
      if (pos_ + 1 < tokens_.size()) ++pos_;
      return t;
   }
   bool acceptSymbol(std::string_view s) {
      if (peek().isSymbol(s)) {
         next();
         return true;
      }
      return false;
   }
   bool acceptWord(std::string_view w) {
      if (peek().isWord(w)) {
         next();
         return true;
      }
      return false;
   }
   [[noreturn]] void fail(std::vector<std::string> expected) const {
      const Token& t = peek();
      throw SyntaxError(t.line, t.column, t.describe(), std::move(expected));
   }
   void expectSymbol(std::string_view s) {
      if (!acceptSymbol(s)) fail({"'" + std::string(s) + "'"});
   }
   void expectWord(std::string_view w) {
      if (!acceptWord(w)) fail({std::string(w)});
   }
   void expectEnd() {
      if (peek().kind != TokenKind::End) fail({"end of input"});
   }

   bool isIdentifierToken(const Token& t) const {
      return t.kind == TokenKind::QuotedIdentifier || (t.kind == TokenKind::Identifier && !isReservedWord(t.text));
   }
   std::string parseIdentifier() {
      if (!isIdentifierToken(peek())) fail({"identifier"});
      return next().text;
   }
   bool startsQuery(size_t ahead = 0) const {
      return peek(ahead).isWord("SELECT") || peek(ahead).isWord("WITH");
   }

   //------------------------------------------------------------------------
   // Statements

   Statement parseStatement() {
      if (acceptWord("CREATE")) {
         if (acceptWord("TABLE")) {
            CreateTable ct;
            ct.name = parseIdentifier();
            expectSymbol("(");
            do {
               ColumnDecl col;
               col.name = parseIdentifier();
               const Token& typeToken = peek();
               auto type = typeToken.kind == TokenKind::Identifier ? scalarTypeFromName(typeToken.text) : std::nullopt;
               if (!type) fail({"VARCHAR", "INTEGER", "DOUBLE", "DATE", "BOOLEAN"});
               next();
               col.type = *type;
               ct.columns.push_back(std::move(col));
            } while (acceptSymbol(","));
            expectSymbol(")");
            return Statement{std::move(ct)};
         }
         if (acceptWord("VIEW")) {
            std::string name = parseIdentifier();
            expectWord("AS");
            return Statement{CreateView{std::move(name), QueryPtr(parseQuery())}};
         }
         fail({"TABLE", "VIEW"});
      }
      if (startsQuery()) return Statement{parseQuery()};
      fail({"SELECT", "WITH", "CREATE"});
   }

   Query parseQuery() {
      Query q;
      if (acceptWord("WITH")) {
         do {
            std::string name = parseIdentifier();
            expectWord("AS");
            expectSymbol("(");
            QueryPtr body(parseQuery());
            expectSymbol(")");
            q.with.push_back(CommonTableExpr{std::move(name), std::move(body)});
         } while (acceptSymbol(","));
      }
      q.select = parseSelect();
      if (acceptWord("ORDER")) {
         expectWord("BY");
         do {
            OrderItem item{parseExpr()};
            if (acceptWord("DESC"))
               item.descending = true;
            else
               acceptWord("ASC");
            q.orderBy.push_back(std::move(item));
         } while (acceptSymbol(","));
      }
      return q;
   }

   Select parseSelect() {
      Select s;
      expectWord("SELECT");
      do {
         s.items.push_back(parseSelectEntry());
      } while (acceptSymbol(","));
      if (acceptWord("FROM")) {
         do {
            s.from.push_back(parseTableExpr());
         } while (acceptSymbol(","));
      }
      if (acceptWord("WHERE")) s.where = parseExpr();
      if (acceptWord("GROUP")) {
         expectWord("BY");
         GroupBy g;
         if (peek().isSymbol("(") && peek(1).isSymbol(")")) {
            next();
            next();
         } else if (peek().isWord("ROLLUP") && peek(1).isSymbol("(")) {
            next();
            next();
            g.rollup = true;
            do {
               g.keys.push_back(parseExpr());
            } while (acceptSymbol(","));
            expectSymbol(")");
         } else {
            do {
               g.keys.push_back(parseExpr());
            } while (acceptSymbol(","));
         }
         s.groupBy = std::move(g);
      }
      if (acceptWord("HAVING")) s.having = parseExpr();
      return s;
   }

   SelectEntry parseSelectEntry() {
      if (acceptSymbol("*")) return StarItem{};
      if (isIdentifierToken(peek()) && peek(1).isSymbol(".") && peek(2).isSymbol("*")) {
         std::string qualifier = next().text;
         next();
         next();
         return StarItem{std::move(qualifier)};
      }
      SelectItem item{parseExpr(), {}, false};
      if (acceptWord("AS")) {
         if (peek().isWord("MEASURE") && isIdentifierToken(peek(1))) {
            next();
            item.isMeasure = true;
         }
         item.alias = parseIdentifier();
      } else if (isIdentifierToken(peek())) {
         item.alias = next().text;
      }
      return item;
   }

   std::string parseOptionalAlias() {
      if (acceptWord("AS")) return parseIdentifier();
      if (isIdentifierToken(peek())) return next().text;
      return {};
   }

   TableExpr parseTablePrimary() {
      if (acceptSymbol("(")) {
         if (startsQuery()) {
            Query q = parseQuery();
            expectSymbol(")");
            return TableExpr{SubqueryRef{QueryPtr(std::move(q)), parseOptionalAlias()}};
         }
         TableExpr inner = parseTableExpr();
         expectSymbol(")");
         return inner;
      }
      std::string name = parseIdentifier();
      return TableExpr{TableRef{std::move(name), parseOptionalAlias()}};
   }

   TableExpr parseTableExpr() {
      TableExpr left = parseTablePrimary();
      while (true) {
         JoinKind kind;
         if (acceptWord("JOIN")) {
            kind = JoinKind::Inner;
         } else if (acceptWord("INNER")) {
            expectWord("JOIN");
            kind = JoinKind::Inner;
         } else if (acceptWord("LEFT")) {
            acceptWord("OUTER");
            expectWord("JOIN");
            kind = JoinKind::Left;
         } else {
            return left;
         }
         TableExpr right = parseTablePrimary();
         Join j{kind, Box<TableExpr>(std::move(left)), Box<TableExpr>(std::move(right)), std::nullopt, {}};
         if (acceptWord("ON")) {
            j.on = parseExpr();
         } else if (acceptWord("USING")) {
            expectSymbol("(");
            do {
               j.usingColumns.push_back(parseIdentifier());
            } while (acceptSymbol(","));
            expectSymbol(")");
         } else {
            fail({"ON", "USING"});
         }
         left = TableExpr{std::move(j)};
      }
   }

   //------------------------------------------------------------------------
   // Expressions, lowest precedence first

   ExprPtr parseExpr() { return parseOr(); }

   ExprPtr parseOr() {
      ExprPtr left = parseAnd();
      while (acceptWord("OR")) left = binary(BinaryOp::Or, left, parseAnd());
      return left;
   }

   ExprPtr parseAnd() {
      ExprPtr left = parseNot();
      while (acceptWord("AND")) left = binary(BinaryOp::And, left, parseNot());
      return left;
   }

   ExprPtr parseNot() {
      if (acceptWord("NOT")) return unary(UnaryOp::Not, parseNot());
      return parseComparison();
   }

   ExprPtr parseComparison() {
      ExprPtr left = parseAdditive();
      static const std::pair<std::string_view, BinaryOp> ops[] = {
         {"=", BinaryOp::Eq}, {"<>", BinaryOp::Ne}, {"<", BinaryOp::Lt}, {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge},
      };
      for (auto& [sym, op] : ops)
         if (acceptSymbol(sym)) return binary(op, left, parseAdditive());
      if (peek().isWord("IS")) {
         next();
         expectWord("NOT");
         expectWord("DISTINCT");
         expectWord("FROM");
         return binary(BinaryOp::IsNotDistinctFrom, left, parseAdditive());
      }
      return left;
   }

   ExprPtr parseAdditive() {
      ExprPtr left = parseMultiplicative();
      while (true) {
         if (acceptSymbol("+"))
            left = binary(BinaryOp::Add, left, parseMultiplicative());
         else if (acceptSymbol("-"))
            left = binary(BinaryOp::Sub, left, parseMultiplicative());
         else
            return left;
      }
   }

   ExprPtr parseMultiplicative() {
      ExprPtr left = parseUnary();
      while (true) {
         if (acceptSymbol("*"))
            left = binary(BinaryOp::Mul, left, parseUnary());
         else if (acceptSymbol("/"))
            left = binary(BinaryOp::Div, left, parseUnary());
         else
            return left;
      }
   }

   ExprPtr parseUnary() {
      if (peek().isSymbol("-")) {
         TokenKind k = peek(1).kind;
         if (k == TokenKind::Integer || k == TokenKind::Decimal) {
            next();
            return parsePostfix(numberLiteral(next(), true));
         }
         next();
         return unary(UnaryOp::Neg, parseUnary());
      }
      return parsePostfix(parsePrimary());
   }

   ExprPtr parsePostfix(ExprPtr e) {
      while (peek().isWord("AT") && peek(1).isSymbol("(")) {
         next();
         next();
         AtExpr at{e, {}};
         while (!peek().isSymbol(")")) at.modifiers.push_back(parseModifier());
         if (at.modifiers.empty()) fail({"ALL", "SET", "VISIBLE", "WHERE"});
         next();
         e = Expr{std::move(at)};
      }
      return e;
   }

   bool atModifierBoundary() const {
      const Token& t = peek();
      return t.isSymbol(")") || t.isWord("ALL") || t.isWord("SET") || t.isWord("VISIBLE") || t.isWord("WHERE") || t.kind == TokenKind::End;
   }

   ContextModifier parseModifier() {
      if (acceptWord("ALL")) {
         if (atModifierBoundary()) return AllBare{};
         AllDims all;
         do {
            all.dimensions.push_back(parseAdditive());
            acceptSymbol(",");
         } while (!atModifierBoundary());
         return all;
      }
      if (acceptWord("SET")) {
         ExprPtr dim = parseAdditive();
         expectSymbol("=");
         return SetDim{dim, parseExpr()};
      }
      if (acceptWord("VISIBLE")) return Visible{};
      if (acceptWord("WHERE")) return WherePred{parseExpr()};
      fail({"ALL", "SET", "VISIBLE", "WHERE"});
   }

   ExprPtr numberLiteral(const Token& t, bool negative) {
      std::string text = negative ? "-" + t.text : t.text;
      if (t.kind == TokenKind::Integer) {
         int64_t v = 0;
         auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
         if (ec == std::errc() && p == text.data() + text.size()) return literal(Value(v));
      }
      double d = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
      if (ec != std::errc()) throw SyntaxError(t.line, t.column, "number " + t.text, {});
      return literal(Value(d));
   }

   std::optional<AggregateFn> aggregateName(std::string_view name) const {
      if (iequals(name, "SUM")) return AggregateFn::Sum;
      if (iequals(name, "COUNT")) return AggregateFn::Count;
      if (iequals(name, "AVG")) return AggregateFn::Avg;
      return std::nullopt;
   }

   ExprPtr parsePrimary() {
      const Token& t = peek();
      switch (t.kind) {
         case TokenKind::Integer:
         case TokenKind::Decimal: return numberLiteral(next(), false);
         case TokenKind::String: return literal(Value(next().text));
         case TokenKind::Symbol:
            if (acceptSymbol("(")) {
               if (startsQuery()) {
                  Query q = parseQuery();
                  expectSymbol(")");
                  return scalarSubquery(std::move(q));
               }
               ExprPtr e = parseExpr();
               expectSymbol(")");
               return e;
            }
            fail({"expression"});
         case TokenKind::End: fail({"expression"});
         default: break;
      }
      if (t.kind == TokenKind::Identifier) {
         if (acceptWord("NULL")) return literal(Value());
         if (acceptWord("TRUE")) return literal(Value(true));
         if (acceptWord("FALSE")) return literal(Value(false));
         if (t.isWord("EXISTS")) {
            next();
            expectSymbol("(");
            Query q = parseQuery();
            expectSymbol(")");
            return exists(std::move(q));
         }
         if (t.isWord("DATE") && peek(1).kind == TokenKind::String) {
            next();
            const Token& lit = next();
            auto d = Date::parse(lit.text);
            if (!d) throw SyntaxError(lit.line, lit.column, "date literal '" + lit.text + "'", {"'YYYY-MM-DD'"});
            return literal(Value(*d));
         }
         if (t.isWord("CURRENT") && (isIdentifierToken(peek(1)) || peek(1).isSymbol("("))) {
            next();
            return Expr{CurrentRef{parsePrimary()}};
         }
         if (t.isWord("AGGREGATE") && peek(1).isSymbol("(")) {
            next();
            next();
            ExprPtr operand = parseExpr();
            expectSymbol(")");
            return Expr{AggregateMeasureCall{operand}};
         }
         if (t.isWord("EVAL") && peek(1).isSymbol("(")) {
            next();
            next();
            ExprPtr operand = parseExpr();
            expectSymbol(")");
            return operand;
         }
      }
      std::string name = parseIdentifier();
      if (acceptSymbol("(")) return parseCall(std::move(name));
      if (acceptSymbol(".")) return column(std::move(name), parseIdentifier());
      return column("", std::move(name));
   }

   ExprPtr parseCall(std::string name) {
      if (auto fn = aggregateName(name)) {
         std::optional<ExprPtr> arg;
         if (*fn == AggregateFn::Count && acceptSymbol("*")) {
            fn = AggregateFn::CountStar;
         } else {
            arg = parseExpr();
         }
         expectSymbol(")");
         if (acceptWord("OVER")) {
            expectSymbol("(");
            WindowCall w{*fn, arg, {}};
            if (acceptWord("PARTITION")) {
               expectWord("BY");
               do {
                  w.partitionBy.push_back(parseExpr());
               } while (acceptSymbol(","));
            }
            expectSymbol(")");
            return Expr{std::move(w)};
         }
         return aggregate(*fn, arg);
      }
      std::vector<ExprPtr> args;
      if (!acceptSymbol(")")) {
         do {
            args.push_back(parseExpr());
         } while (acceptSymbol(","));
         expectSymbol(")");
      }
      return function(std::move(name), std::move(args));
   }

   std::vector<Token> tokens_;
   size_t pos_ = 0;
};

}

std::vector<Statement> parse(std::string_view text) {
   return Parser(text).parseScript();
}

Query parseQuery(std::string_view text) {
   return Parser(text).parseSingleQuery();
}

ExprPtr parseExpression(std::string_view text) {
   return Parser(text).parseSingleExpression();
}

}
