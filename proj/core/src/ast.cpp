#include "measql/ast.hpp"

namespace measql::ast {

std::string_view toString(BinaryOp op) {
   switch (op) {
      case BinaryOp::Add: return "+";
      case BinaryOp::Sub: return "-";
      case BinaryOp::Mul: return "*";
      case BinaryOp::Div: return "/";
      case BinaryOp::Eq: return "=";
      case BinaryOp::Ne: return "<>";
      case BinaryOp::Lt: return "<";
      case BinaryOp::Le: return "<=";
      case BinaryOp::Gt: return ">";
      case BinaryOp::Ge: return ">=";
      case BinaryOp::And: return "AND";
      case BinaryOp::Or: return "OR";
      case BinaryOp::IsNotDistinctFrom: return "IS NOT DISTINCT FROM";
   }
   return "?";
}

std::string_view toString(AggregateFn fn) {
   switch (fn) {
      case AggregateFn::Sum: return "SUM";
      case AggregateFn::Count:
      case AggregateFn::CountStar: return "COUNT";
      case AggregateFn::Avg: return "AVG";
   }
   return "?";
}

ExprPtr column(std::string qualifier, std::string name) {
   return Expr{ColumnRef{std::move(qualifier), std::move(name)}};
}

ExprPtr literal(Value v) {
   return Expr{Literal{std::move(v)}};
}

ExprPtr binary(BinaryOp op, ExprPtr left, ExprPtr right) {
   return Expr{Binary{op, std::move(left), std::move(right)}};
}

ExprPtr unary(UnaryOp op, ExprPtr operand) {
   return Expr{Unary{op, std::move(operand)}};
}

ExprPtr function(std::string name, std::vector<ExprPtr> args) {
   return Expr{FunctionCall{std::move(name), std::move(args)}};
}

ExprPtr aggregate(AggregateFn fn, std::optional<ExprPtr> arg) {
   return Expr{AggregateCall{fn, std::move(arg)}};
}

ExprPtr scalarSubquery(Query q) {
   return Expr{ScalarSubquery{QueryPtr(std::move(q))}};
}

ExprPtr exists(Query q) {
   return Expr{Exists{QueryPtr(std::move(q))}};
}

ExprPtr conjunction(const std::vector<ExprPtr>& operands) {
   if (operands.empty()) return literal(Value(true));
   ExprPtr result = operands.front();
   for (size_t i = 1; i < operands.size(); ++i) result = binary(BinaryOp::And, result, operands[i]);
   return result;
}

static void collectConjuncts(const ExprPtr& e, std::vector<ExprPtr>& out) {
   if (auto b = e->as<Binary>(); b && b->op == BinaryOp::And) {
      collectConjuncts(b->left, out);
      collectConjuncts(b->right, out);
   } else {
      out.push_back(e);
   }
}

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
   std::vector<ExprPtr> out;
   collectConjuncts(e, out);
   return out;
}

bool isLiteralTrue(const Expr& e) {
   auto l = e.as<Literal>();
   return l && l->value.isBool() && l->value.asBool();
}

ExprPtr rewrite(const ExprPtr& e, const ExprRewriter& fn) {
   if (auto replaced = fn(e)) return *replaced;
   auto r = [&](const ExprPtr& x) { return rewrite(x, fn); };
   auto ro = [&](const std::optional<ExprPtr>& x) -> std::optional<ExprPtr> {
      if (!x) return std::nullopt;
      return r(*x);
   };
   return std::visit(
      [&](const auto& n) -> ExprPtr {
         using T = std::decay_t<decltype(n)>;
         if constexpr (std::is_same_v<T, ColumnRef> || std::is_same_v<T, Literal>) {
            return e;
         } else if constexpr (std::is_same_v<T, Unary>) {
            return Expr{Unary{n.op, r(n.operand)}};
         } else if constexpr (std::is_same_v<T, Binary>) {
            return Expr{Binary{n.op, r(n.left), r(n.right)}};
         } else if constexpr (std::is_same_v<T, FunctionCall>) {
            std::vector<ExprPtr> args;
            for (auto& a : n.args) args.push_back(r(a));
            return Expr{FunctionCall{n.name, std::move(args)}};
         } else if constexpr (std::is_same_v<T, AggregateCall>) {
            return Expr{AggregateCall{n.fn, ro(n.arg)}};
         } else if constexpr (std::is_same_v<T, WindowCall>) {
            std::vector<ExprPtr> partition;
            for (auto& p : n.partitionBy) partition.push_back(r(p));
            return Expr{WindowCall{n.fn, ro(n.arg), std::move(partition)}};
         } else if constexpr (std::is_same_v<T, AggregateMeasureCall>) {
            return Expr{AggregateMeasureCall{r(n.operand)}};
         } else if constexpr (std::is_same_v<T, AtExpr>) {
            std::vector<ContextModifier> mods;
            for (auto& m : n.modifiers) {
               if (auto all = std::get_if<AllDims>(&m)) {
                  AllDims out;
                  for (auto& d : all->dimensions) out.dimensions.push_back(r(d));
                  mods.push_back(std::move(out));
               } else if (auto set = std::get_if<SetDim>(&m)) {
                  mods.push_back(SetDim{r(set->dimension), r(set->value)});
               } else if (auto where = std::get_if<WherePred>(&m)) {
                  mods.push_back(WherePred{r(where->predicate)});
               } else {
                  mods.push_back(m);
               }
            }
            return Expr{AtExpr{r(n.base), std::move(mods)}};
         } else if constexpr (std::is_same_v<T, CurrentRef>) {
            return Expr{CurrentRef{r(n.dimension)}};
         } else {
            return Expr{T{QueryPtr(rewrite(*n.query, fn))}};
         }
      },
      e->node);
}

TableExpr rewrite(const TableExpr& t, const ExprRewriter& fn) {
   if (auto s = t.as<SubqueryRef>()) return TableExpr{SubqueryRef{QueryPtr(rewrite(*s->query, fn)), s->alias}};
   if (auto j = t.as<Join>()) {
      std::optional<ExprPtr> on;
      if (j->on) on = rewrite(*j->on, fn);
      return TableExpr{Join{j->kind, Box<TableExpr>(rewrite(*j->left, fn)), Box<TableExpr>(rewrite(*j->right, fn)), on, j->usingColumns}};
   }
   return t;
}

Query rewrite(const Query& q, const ExprRewriter& fn) {
   Query out;
   for (auto& cte : q.with) out.with.push_back(CommonTableExpr{cte.name, QueryPtr(rewrite(*cte.query, fn))});
   const Select& s = q.select;
   for (auto& entry : s.items) {
      if (auto item = std::get_if<SelectItem>(&entry))
         out.select.items.push_back(SelectItem{rewrite(item->expr, fn), item->alias, item->isMeasure});
      else
         out.select.items.push_back(entry);
   }
   for (auto& t : s.from) out.select.from.push_back(rewrite(t, fn));
   if (s.where) out.select.where = rewrite(*s.where, fn);
   if (s.groupBy) {
      GroupBy g{s.groupBy->rollup, {}};
      for (auto& k : s.groupBy->keys) g.keys.push_back(rewrite(k, fn));
      out.select.groupBy = std::move(g);
   }
   if (s.having) out.select.having = rewrite(*s.having, fn);
   for (auto& o : q.orderBy) out.orderBy.push_back(OrderItem{rewrite(o.expr, fn), o.descending});
   return out;
}

namespace {

bool anyInQuery(const Query& q, bool measureDecl);

bool anyInExpr(const Expr& e, bool measureDecl) {
   return std::visit(
      [&](const auto& n) -> bool {
         using T = std::decay_t<decltype(n)>;
         if constexpr (std::is_same_v<T, AggregateMeasureCall> || std::is_same_v<T, AtExpr> || std::is_same_v<T, CurrentRef>) {
            return !measureDecl;
         } else if constexpr (std::is_same_v<T, Unary>) {
            return anyInExpr(*n.operand, measureDecl);
         } else if constexpr (std::is_same_v<T, Binary>) {
            return anyInExpr(*n.left, measureDecl) || anyInExpr(*n.right, measureDecl);
         } else if constexpr (std::is_same_v<T, FunctionCall>) {
            for (auto& a : n.args)
               if (anyInExpr(*a, measureDecl)) return true;
            return false;
         } else if constexpr (std::is_same_v<T, AggregateCall>) {
            return n.arg && anyInExpr(**n.arg, measureDecl);
         } else if constexpr (std::is_same_v<T, WindowCall>) {
            if (n.arg && anyInExpr(**n.arg, measureDecl)) return true;
            for (auto& p : n.partitionBy)
               if (anyInExpr(*p, measureDecl)) return true;
            return false;
         } else if constexpr (std::is_same_v<T, ScalarSubquery> || std::is_same_v<T, Exists>) {
            return anyInQuery(*n.query, measureDecl);
         } else {
            return false;
         }
      },
      e.node);
}

bool anyInTable(const TableExpr& t, bool measureDecl) {
   if (auto s = t.as<SubqueryRef>()) return anyInQuery(*s->query, measureDecl);
   if (auto j = t.as<Join>()) return anyInTable(*j->left, measureDecl) || anyInTable(*j->right, measureDecl) || (j->on && anyInExpr(**j->on, measureDecl));
   return false;
}

bool anyInQuery(const Query& q, bool measureDecl) {
   for (auto& cte : q.with)
      if (anyInQuery(*cte.query, measureDecl)) return true;
   const Select& s = q.select;
   for (auto& entry : s.items)
      if (auto item = std::get_if<SelectItem>(&entry)) {
         if (measureDecl && item->isMeasure) return true;
         if (anyInExpr(*item->expr, measureDecl)) return true;
      }
   for (auto& t : s.from)
      if (anyInTable(t, measureDecl)) return true;
   if (s.where && anyInExpr(**s.where, measureDecl)) return true;
   if (s.groupBy)
      for (auto& k : s.groupBy->keys)
         if (anyInExpr(*k, measureDecl)) return true;
   if (s.having && anyInExpr(**s.having, measureDecl)) return true;
   for (auto& o : q.orderBy)
      if (anyInExpr(*o.expr, measureDecl)) return true;
   return false;
}

}

bool containsExtensionNodes(const Expr& e) {
   return anyInExpr(e, false);
}

bool containsExtensionNodes(const Query& q) {
   return anyInQuery(q, false);
}

bool containsMeasureDecl(const Query& q) {
   return anyInQuery(q, true);
}

}
