#include "measql/printer.hpp"

#include "measql/names.hpp"
#include "measql/parser.hpp"

#include <cctype>
#include <cmath>

namespace measql {

using namespace ast;

namespace {

// Binding strength, loosest first
enum Prec : int { Or = 1, And, Not, Cmp, Add, Mul, Neg, At, Primary };

int precedence(BinaryOp op) {
   switch (op) {
      case BinaryOp::Or: return Or;
      case BinaryOp::And: return And;
      case BinaryOp::Add:
      case BinaryOp::Sub: return Add;
      case BinaryOp::Mul:
      case BinaryOp::Div: return Mul;
      default: return Cmp;
   }
}

int precedence(const Expr& e) {
   if (auto b = e.as<Binary>()) return precedence(b->op);
   if (auto u = e.as<Unary>()) return u->op == UnaryOp::Not ? Not : Neg;
   if (e.is<AtExpr>()) return At;
   return Primary;
}

bool isNegativeNumber(const Expr& e) {
   auto l = e.as<Literal>();
   if (!l) return false;
   if (l->value.isInteger()) return l->value.asInteger() < 0;
   if (l->value.isDouble()) return std::signbit(l->value.asDouble());
   return false;
}

std::string quoteString(const std::string& s) {
   std::string out = "'";
   for (char c : s) {
      out.push_back(c);
      if (c == '\'') out.push_back('\'');
   }
   return out + "'";
}

std::string printLiteral(const Value& v) {
   if (v.isNull()) return "NULL";
   if (v.isBool()) return v.asBool() ? "TRUE" : "FALSE";
   if (v.isInteger()) return std::to_string(v.asInteger());
   if (v.isDouble()) {
      std::string s = formatDouble(v.asDouble());
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
   }
   if (v.isDate()) return "DATE '" + v.asDate().toString() + "'";
   return quoteString(v.asString());
}

class Printer {
   public:
   std::string expr(const Expr& e, const std::string& indent) {
      return std::visit([&](const auto& n) { return node(n, indent); }, e.node);
   }

   std::string query(const Query& q, const std::string& indent) {
      std::string nl = "\n" + indent;
      std::string out;
      if (!q.with.empty()) {
         out += "WITH ";
         for (size_t i = 0; i < q.with.size(); ++i) {
            if (i) out += "," + nl + "  ";
            out += printIdentifier(q.with[i].name) + " AS (" + query(*q.with[i].query, indent + "    ") + ")";
         }
         out += nl;
      }
      out += select(q.select, indent);
      if (!q.orderBy.empty()) {
         out += nl + "ORDER BY ";
         for (size_t i = 0; i < q.orderBy.size(); ++i) {
            if (i) out += ", ";
            out += expr(*q.orderBy[i].expr, indent);
            if (q.orderBy[i].descending) out += " DESC";
         }
      }
      return out;
   }

   private:
   std::string child(const Expr& e, bool parens, const std::string& indent) {
      std::string s = expr(e, indent);
      return parens ? "(" + s + ")" : s;
   }

   std::string subquery(const Query& q, const std::string& indent) {
      return "(" + query(q, indent + "    ") + ")";
   }

   std::string node(const ColumnRef& c, const std::string&) {
      if (c.qualifier.empty()) return printIdentifier(c.name);
      return printIdentifier(c.qualifier) + "." + printIdentifier(c.name);
   }
   std::string node(const Literal& l, const std::string&) { return printLiteral(l.value); }
   std::string node(const Unary& u, const std::string& indent) {
      if (u.op == UnaryOp::Neg) return "-(" + expr(*u.operand, indent) + ")";
      return "NOT " + child(*u.operand, precedence(*u.operand) < Not, indent);
   }
   std::string node(const Binary& b, const std::string& indent) {
      int p = precedence(b.op);
      bool leftParens = p == Cmp ? precedence(*b.left) <= p : precedence(*b.left) < p;
      bool rightParens = precedence(*b.right) <= p;
      return child(*b.left, leftParens, indent) + " " + std::string(toString(b.op)) + " " + child(*b.right, rightParens, indent);
   }
   std::string node(const FunctionCall& f, const std::string& indent) {
      std::string out = printIdentifier(f.name) + "(";
      for (size_t i = 0; i < f.args.size(); ++i) {
         if (i) out += ", ";
         out += expr(*f.args[i], indent);
      }
      return out + ")";
   }
   std::string aggregateText(AggregateFn fn, const std::optional<ExprPtr>& arg, const std::string& indent) {
      if (fn == AggregateFn::CountStar) return "COUNT(*)";
      return std::string(toString(fn)) + "(" + (arg ? expr(**arg, indent) : "") + ")";
   }
   std::string node(const AggregateCall& a, const std::string& indent) { return aggregateText(a.fn, a.arg, indent); }
   std::string node(const WindowCall& w, const std::string& indent) {
      std::string out = aggregateText(w.fn, w.arg, indent) + " OVER (";
      if (!w.partitionBy.empty()) {
         out += "PARTITION BY ";
         for (size_t i = 0; i < w.partitionBy.size(); ++i) {
            if (i) out += ", ";
            out += expr(*w.partitionBy[i], indent);
         }
      }
      return out + ")";
   }
   std::string node(const AggregateMeasureCall& a, const std::string& indent) { return "AGGREGATE(" + expr(*a.operand, indent) + ")"; }
   std::string dimension(const Expr& e, const std::string& indent) {
      bool simple = precedence(e) == Primary && !isNegativeNumber(e) && !e.is<CurrentRef>();
      return child(e, !simple, indent);
   }
   std::string modifier(const ContextModifier& m, const std::string& indent) {
      if (std::holds_alternative<AllBare>(m)) return "ALL";
      if (std::holds_alternative<Visible>(m)) return "VISIBLE";
      if (auto all = std::get_if<AllDims>(&m)) {
         std::string out = "ALL ";
         for (size_t i = 0; i < all->dimensions.size(); ++i) out += (i ? ", " : "") + dimension(*all->dimensions[i], indent);
         return out;
      }
      if (auto set = std::get_if<SetDim>(&m)) return "SET " + dimension(*set->dimension, indent) + " = " + expr(*set->value, indent);
      return "WHERE " + expr(*std::get<WherePred>(m).predicate, indent);
   }
   std::string node(const AtExpr& a, const std::string& indent) {
      std::string out = child(*a.base, precedence(*a.base) < At, indent) + " AT (";
      for (size_t i = 0; i < a.modifiers.size(); ++i) {
         if (i) out += " ";
         out += modifier(a.modifiers[i], indent);
      }
      return out + ")";
   }
   std::string node(const CurrentRef& c, const std::string& indent) {
      // CURRENT must be followed by a name or an opening parenthesis
      auto& d = *c.dimension;
      bool bare = d.is<ColumnRef>() || d.is<FunctionCall>() || d.is<AggregateCall>() || d.is<ScalarSubquery>();
      return "CURRENT " + child(d, !bare, indent);
   }
   std::string node(const ScalarSubquery& s, const std::string& indent) { return subquery(*s.query, indent); }
   std::string node(const Exists& e, const std::string& indent) { return "EXISTS " + subquery(*e.query, indent); }

   std::string table(const TableExpr& t, const std::string& indent, bool nested) {
      if (auto ref = t.as<TableRef>()) {
         std::string out = printIdentifier(ref->name);
         if (!ref->alias.empty()) out += " AS " + printIdentifier(ref->alias);
         return out;
      }
      if (auto sub = t.as<SubqueryRef>()) {
         std::string out = subquery(*sub->query, indent);
         if (!sub->alias.empty()) out += " AS " + printIdentifier(sub->alias);
         return out;
      }
      const Join& j = *t.as<Join>();
      std::string out = table(*j.left, indent, false);
      out += "\n" + indent + "  " + (j.kind == JoinKind::Left ? "LEFT JOIN " : "JOIN ");
      out += table(*j.right, indent + "  ", true);
      if (j.on) {
         out += " ON " + expr(**j.on, indent);
      } else {
         out += " USING (";
         for (size_t i = 0; i < j.usingColumns.size(); ++i) {
            if (i) out += ", ";
            out += printIdentifier(j.usingColumns[i]);
         }
         out += ")";
      }
      return nested ? "(" + out + ")" : out;
   }

   std::string select(const Select& s, const std::string& indent) {
      std::string nl = "\n" + indent;
      std::string out = "SELECT ";
      for (size_t i = 0; i < s.items.size(); ++i) {
         if (i) out += "," + nl + "  ";
         if (auto star = std::get_if<StarItem>(&s.items[i])) {
            out += star->qualifier.empty() ? "*" : printIdentifier(star->qualifier) + ".*";
            continue;
         }
         auto& item = std::get<SelectItem>(s.items[i]);
         out += expr(*item.expr, indent + "  ");
         if (!item.alias.empty()) out += std::string(item.isMeasure ? " AS MEASURE " : " AS ") + printIdentifier(item.alias);
      }
      if (!s.from.empty()) {
         out += nl + "FROM ";
         for (size_t i = 0; i < s.from.size(); ++i) {
            if (i) out += ", ";
            out += table(s.from[i], indent, false);
         }
      }
      if (s.where) out += nl + "WHERE " + expr(**s.where, indent);
      if (s.groupBy) {
         out += nl + "GROUP BY ";
         if (s.groupBy->keys.empty()) {
            out += "()";
         } else {
            if (s.groupBy->rollup) out += "ROLLUP(";
            for (size_t i = 0; i < s.groupBy->keys.size(); ++i) {
               if (i) out += ", ";
               out += expr(*s.groupBy->keys[i], indent);
            }
            if (s.groupBy->rollup) out += ")";
         }
      }
      if (s.having) out += nl + "HAVING " + expr(**s.having, indent);
      return out;
   }
};

}

std::string printIdentifier(std::string_view name) {
   bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
   for (char c : name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$')) plain = false;
   if (plain && !isReservedWord(name) && !isContextualWord(name) && scalarTypeFromName(name) == std::nullopt) return std::string(name);
   std::string out = "\"";
   for (char c : name) {
      out.push_back(c);
      if (c == '"') out.push_back('"');
   }
   return out + "\"";
}

std::string print(const Expr& expr) {
   return Printer().expr(expr, "");
}

std::string print(const Query& query) {
   return Printer().query(query, "");
}

std::string print(const Statement& statement) {
   if (auto q = statement.as<Query>()) return print(*q);
   if (auto v = statement.as<CreateView>()) return "CREATE VIEW " + printIdentifier(v->name) + " AS\n" + print(*v->query);
   auto& t = *statement.as<CreateTable>();
   std::string out = "CREATE TABLE " + printIdentifier(t.name) + " (";
   for (size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ", ";
      out += printIdentifier(t.columns[i].name) + " " + std::string(toString(t.columns[i].type));
   }
   return out + ")";
}

std::string printScript(const std::vector<Statement>& statements) {
   std::string out;
   for (auto& s : statements) out += print(s) + ";\n";
   return out;
}

}
