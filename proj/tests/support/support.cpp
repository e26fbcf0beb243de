#include "support.hpp"

#include "measql/names.hpp"
#include "measql/render.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace measql::testing {

using namespace ast;

std::filesystem::path dataDir() {
   return MEASQL_TEST_DATA_DIR;
}

std::filesystem::path dataFile(const std::string& name) {
   return dataDir() / name;
}

std::string readData(const std::string& name) {
   return readFile(dataFile(name));
}

Session sampleSession() {
   return Session::open(dataFile("schema.sql"), dataDir());
}

namespace {

using Scope = std::vector<std::pair<std::string, std::string>>;

class Canonicalizer {
   public:
   Query query(const Query& q, Scope scope) {
      Query out;
      for (auto& cte : q.with) out.with.push_back(CommonTableExpr{cte.name, QueryPtr(query(*cte.query, scope))});
      Scope inner = scope;
      for (auto& t : q.select.from) out.select.from.push_back(table(t, scope, inner));
      for (auto& entry : q.select.items) {
         if (auto item = std::get_if<SelectItem>(&entry))
            out.select.items.push_back(SelectItem{expr(item->expr, inner), item->alias, item->isMeasure});
         else if (auto star = std::get_if<StarItem>(&entry))
            out.select.items.push_back(StarItem{star->qualifier.empty() ? "" : lookup(star->qualifier, inner)});
      }
      if (q.select.where) out.select.where = expr(*q.select.where, inner);
      if (q.select.groupBy) {
         GroupBy g{q.select.groupBy->rollup, {}};
         for (auto& k : q.select.groupBy->keys) g.keys.push_back(expr(k, inner));
         out.select.groupBy = g;
      }
      if (q.select.having) out.select.having = expr(*q.select.having, inner);
      for (auto& o : q.orderBy) out.orderBy.push_back(OrderItem{expr(o.expr, inner), o.descending});
      return out;
   }

   private:
   std::string fresh() { return "a" + std::to_string(next_++); }

   static std::string lookup(const std::string& name, const Scope& scope) {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
         if (iequals(it->first, name)) return it->second;
      return name;
   }

   // `outer` is what the item's own subqueries see; new aliases go into `inner`
   TableExpr table(const TableExpr& t, const Scope& outer, Scope& inner) {
      if (auto ref = t.as<TableRef>()) {
         std::string canonical = fresh();
         inner.emplace_back(ref->alias.empty() ? ref->name : ref->alias, canonical);
         return TableExpr{TableRef{ref->name, canonical}};
      }
      if (auto sub = t.as<SubqueryRef>()) {
         Query q = query(*sub->query, outer);
         std::string canonical = fresh();
         if (!sub->alias.empty()) inner.emplace_back(sub->alias, canonical);
         return TableExpr{SubqueryRef{QueryPtr(std::move(q)), canonical}};
      }
      auto& j = *t.as<Join>();
      TableExpr left = table(*j.left, outer, inner);
      TableExpr right = table(*j.right, outer, inner);
      std::optional<ExprPtr> on;
      if (j.on) on = expr(*j.on, inner);
      return TableExpr{Join{j.kind, Box<TableExpr>(std::move(left)), Box<TableExpr>(std::move(right)), on, j.usingColumns}};
   }

   ExprPtr expr(const ExprPtr& e, const Scope& scope) {
      return rewrite(e, [&](const ExprPtr& n) -> std::optional<ExprPtr> {
         if (auto c = n->as<ColumnRef>()) {
            if (c->qualifier.empty()) return std::nullopt;
            return column(lookup(c->qualifier, scope), c->name);
         }
         if (auto s = n->as<ScalarSubquery>()) return scalarSubquery(query(*s->query, scope));
         if (auto s = n->as<Exists>()) return exists(query(*s->query, scope));
         return std::nullopt;
      });
   }

   unsigned next_ = 0;
};

bool rowLess(const Row& a, const Row& b) {
   for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (sortsBefore(a[i], b[i])) return true;
      if (sortsBefore(b[i], a[i])) return false;
   }
   return a.size() < b.size();
}

}

Query canonicalAliases(const Query& q) {
   return Canonicalizer().query(q, {});
}

bool valuesClose(const Value& a, const Value& b, double relTol) {
   if (a.isNumber() && b.isNumber()) {
      double x = a.toDouble(), y = b.toDouble();
      if (x == y) return true;
      return std::fabs(x - y) <= relTol * std::max(std::fabs(x), std::fabs(y));
   }
   return a == b;
}

bool relationsClose(const Relation& a, const Relation& b, double relTol, bool ignoreOrder) {
   if (a.columnNames.size() != b.columnNames.size() || a.rows.size() != b.rows.size()) return false;
   auto x = a.rows, y = b.rows;
   if (ignoreOrder) {
      std::stable_sort(x.begin(), x.end(), rowLess);
      std::stable_sort(y.begin(), y.end(), rowLess);
   }
   for (size_t r = 0; r < x.size(); ++r) {
      if (x[r].size() != y[r].size()) return false;
      for (size_t c = 0; c < x[r].size(); ++c)
         if (!valuesClose(x[r][c], y[r][c], relTol)) return false;
   }
   return true;
}

size_t columnIndex(const Relation& r, const std::string& name) {
   for (size_t i = 0; i < r.columnNames.size(); ++i)
      if (iequals(r.columnNames[i], name)) return i;
   throw std::out_of_range("no column " + name);
}

std::string show(const Relation& r) {
   return renderTable(r);
}

}
