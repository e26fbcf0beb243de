#include "measql/rewriter.hpp"

#include "measql/error.hpp"
#include "measql/printer.hpp"

#include <map>

namespace measql {

using namespace ast;

std::string freshAlias(const std::string& hint, const std::set<std::string, CaseInsensitiveLess>& used) {
   if (!used.count(hint)) return hint;
   for (unsigned n = 0;; ++n) {
      std::string candidate = hint + std::to_string(n);
      if (!used.count(candidate)) return candidate;
   }
}

AtExpr expandAggregateSugar(const AggregateMeasureCall& call) {
   return AtExpr{call.operand, {Visible{}}};
}

namespace {

using AliasMap = std::map<std::string, std::string, CaseInsensitiveLess>;
using AliasSet = std::set<std::string, CaseInsensitiveLess>;

void topLevelAliases(const TableExpr& t, std::vector<std::string>& out) {
   if (auto ref = t.as<TableRef>()) out.push_back(ref->alias);
   else if (auto sub = t.as<SubqueryRef>()) out.push_back(sub->alias);
   else {
      auto& j = *t.as<Join>();
      topLevelAliases(*j.left, out);
      topLevelAliases(*j.right, out);
   }
}

void collectAliases(const Query& q, AliasSet& used) {
   std::vector<std::string> names;
   for (auto& t : q.select.from) topLevelAliases(t, names);
   used.insert(names.begin(), names.end());
   // rewrite visits derived tables and expression subqueries; nested aliases are collected on the way
   rewrite(q, [&](const ExprPtr& e) -> std::optional<ExprPtr> {
      if (auto s = e->as<ScalarSubquery>()) collectAliases(*s->query, used);
      if (auto s = e->as<Exists>()) collectAliases(*s->query, used);
      return std::nullopt;
   });
   std::function<void(const TableExpr&)> tables = [&](const TableExpr& t) {
      if (auto sub = t.as<SubqueryRef>()) collectAliases(*sub->query, used);
      else if (auto j = t.as<Join>()) {
         tables(*j->left);
         tables(*j->right);
      }
   };
   for (auto& t : q.select.from) tables(t);
}

Query renameQuery(const Query& q, const AliasMap& m);

ExprPtr rename(const ExprPtr& e, const AliasMap& m) {
   if (m.empty()) return e;
   return rewrite(e, [&](const ExprPtr& x) -> std::optional<ExprPtr> {
      if (auto c = x->as<ColumnRef>()) {
         if (auto it = m.find(c->qualifier); !c->qualifier.empty() && it != m.end()) return column(it->second, c->name);
         return x;
      }
      if (auto s = x->as<ScalarSubquery>()) return Expr{ScalarSubquery{QueryPtr(renameQuery(*s->query, m))}};
      if (auto s = x->as<Exists>()) return Expr{Exists{QueryPtr(renameQuery(*s->query, m))}};
      return std::nullopt;
   });
}

TableExpr renameTables(const TableExpr& t, const AliasMap& visible, const AliasMap& inner) {
   if (auto sub = t.as<SubqueryRef>()) return TableExpr{SubqueryRef{QueryPtr(renameQuery(*sub->query, inner)), sub->alias}};
   if (auto j = t.as<Join>()) {
      std::optional<ExprPtr> on;
      if (j->on) on = rename(*j->on, visible);
      return TableExpr{Join{j->kind, Box<TableExpr>(renameTables(*j->left, visible, inner)), Box<TableExpr>(renameTables(*j->right, visible, inner)), on, j->usingColumns}};
   }
   return t;
}

/// Renames references to outer aliases, respecting aliases the query itself declares
Query renameQuery(const Query& q, const AliasMap& m) {
   AliasMap visible = m;
   std::vector<std::string> own;
   for (auto& t : q.select.from) topLevelAliases(t, own);
   for (auto& a : own) visible.erase(a);
   Query out;
   out.with = q.with;
   for (auto& entry : q.select.items) {
      if (auto si = std::get_if<SelectItem>(&entry))
         out.select.items.push_back(SelectItem{rename(si->expr, visible), si->alias, si->isMeasure});
      else
         out.select.items.push_back(entry);
   }
   for (auto& t : q.select.from) out.select.from.push_back(renameTables(t, visible, visible));
   if (q.select.where) out.select.where = rename(*q.select.where, visible);
   if (q.select.groupBy) {
      GroupBy g{q.select.groupBy->rollup, {}};
      for (auto& k : q.select.groupBy->keys) g.keys.push_back(rename(k, visible));
      out.select.groupBy = std::move(g);
   }
   if (q.select.having) out.select.having = rename(*q.select.having, visible);
   for (auto& o : q.orderBy) out.orderBy.push_back(OrderItem{rename(o.expr, visible), o.descending});
   return out;
}

/// Renames the aliases of a FROM entry of the scope being replicated
TableExpr renameTopLevel(const TableExpr& t, const AliasMap& m) {
   auto renamed = [&](const std::string& a) {
      auto it = m.find(a);
      return it == m.end() ? a : it->second;
   };
   if (auto ref = t.as<TableRef>()) return TableExpr{TableRef{ref->name, renamed(ref->alias)}};
   if (auto sub = t.as<SubqueryRef>()) return TableExpr{SubqueryRef{sub->query, renamed(sub->alias)}};
   auto& j = *t.as<Join>();
   std::optional<ExprPtr> on;
   if (j.on) on = rename(*j.on, m);
   return TableExpr{Join{j.kind, Box<TableExpr>(renameTopLevel(*j.left, m)), Box<TableExpr>(renameTopLevel(*j.right, m)), on, j.usingColumns}};
}

std::vector<ExprPtr> flatConjuncts(const std::vector<ExprPtr>& parts) {
   std::vector<ExprPtr> out;
   for (auto& p : parts)
      for (auto& c : conjuncts(p))
         if (!isLiteralTrue(*c)) out.push_back(c);
   return out;
}

class Rewriter {
   public:
   explicit Rewriter(const ResolvedQuery& r) : r_(r) { collectAliases(*r.query, used_); }

   Query rewriteQuery(const Query& q);
   std::vector<RewriteNote> notes;

   private:
   struct Site {
      const ScopeInfo* scope;
      const Select* select;
      bool whereClause;
   };

   TableExpr rewriteTable(const TableExpr& t, const ScopeInfo& scope, const Select& select);
   ExprPtr rewriteExpr(const ExprPtr& e, const Site& site, const std::vector<ContextModifier>& stack);
   ExprPtr expandMeasure(const ExprPtr& ref, const Site& site, const std::vector<ContextModifier>& stack);
   CallSite callSite(const Site& site, size_t item);
   std::vector<ContextTerm> visibleTerms(const Site& site, size_t item, const CallSite& cs);
   bool overItemOnly(const Expr& e, const ScopeInfo& scope, size_t item);
   ExprPtr toDimensionSpace(const ExprPtr& e, const ScopeInfo& scope, size_t item);
   std::string fresh(const std::string& hint) {
      auto a = freshAlias(hint, used_);
      used_.insert(a);
      return a;
   }

   const ResolvedQuery& r_;
   AliasSet used_;
};

Query Rewriter::rewriteQuery(const Query& q) {
   const ScopeInfo& scope = r_.scope(q.select);
   Site site{&scope, &q.select, false};
   Query out;
   for (auto& t : q.select.from) out.select.from.push_back(rewriteTable(t, scope, q.select));
   if (q.select.where) out.select.where = rewriteExpr(*q.select.where, Site{&scope, &q.select, true}, {});
   if (q.select.groupBy) {
      GroupBy g{q.select.groupBy->rollup, {}};
      for (auto& k : q.select.groupBy->keys) g.keys.push_back(rewriteExpr(k, site, {}));
      out.select.groupBy = std::move(g);
   } else if (scope.groupedByAggregateSugar) {
      out.select.groupBy = GroupBy{false, {}};
   }
   for (auto& entry : q.select.items) {
      auto& si = std::get<SelectItem>(entry);
      if (si.isMeasure) continue;
      out.select.items.push_back(SelectItem{rewriteExpr(si.expr, site, {}), si.alias, false});
   }
   if (out.select.items.empty()) throw Error(ErrorCode::Analysis, "query has no columns besides measures");
   if (q.select.having) out.select.having = rewriteExpr(*q.select.having, site, {});
   for (auto& o : q.orderBy) out.orderBy.push_back(OrderItem{rewriteExpr(o.expr, site, {}), o.descending});
   return out;
}

TableExpr Rewriter::rewriteTable(const TableExpr& t, const ScopeInfo& scope, const Select& select) {
   if (t.as<TableRef>()) return t;
   if (auto sub = t.as<SubqueryRef>()) {
      Query body = rewriteQuery(*sub->query);
      bool hadMeasures = false;
      for (auto& entry : sub->query->select.items)
         if (std::get<SelectItem>(entry).isMeasure) hadMeasures = true;
      if (hadMeasures && body.with.empty() && body.select.from.size() == 1 && !body.select.where && !body.select.groupBy && !body.select.having && body.orderBy.empty()) {
         if (auto base = body.select.from[0].as<TableRef>()) {
            bool plain = true;
            for (auto& entry : body.select.items) {
               auto& si = std::get<SelectItem>(entry);
               auto c = si.expr->as<ColumnRef>();
               if (!c || !iequals(c->qualifier, base->alias) || c->name != si.alias) plain = false;
            }
            if (plain) return TableExpr{TableRef{base->name, sub->alias}};
         }
      }
      return TableExpr{SubqueryRef{QueryPtr(std::move(body)), sub->alias}};
   }
   auto& j = *t.as<Join>();
   std::optional<ExprPtr> on;
   if (j.on) on = rewriteExpr(*j.on, Site{&scope, &select, false}, {});
   return TableExpr{Join{j.kind, Box<TableExpr>(rewriteTable(*j.left, scope, select)), Box<TableExpr>(rewriteTable(*j.right, scope, select)), on, {}}};
}

ExprPtr Rewriter::rewriteExpr(const ExprPtr& e, const Site& site, const std::vector<ContextModifier>& stack) {
   return rewrite(e, [&](const ExprPtr& x) -> std::optional<ExprPtr> {
      auto info = r_.find(*x);
      if (x->is<ColumnRef>() && info && info->isMeasure) return expandMeasure(x, site, stack);
      if (auto a = x->as<AggregateMeasureCall>()) {
         auto at = expandAggregateSugar(*a);
         auto inner = stack;
         inner.insert(inner.end(), at.modifiers.begin(), at.modifiers.end());
         return rewriteExpr(at.base, site, inner);
      }
      if (auto at = x->as<AtExpr>()) {
         auto inner = stack;
         inner.insert(inner.end(), at->modifiers.begin(), at->modifiers.end());
         return rewriteExpr(at->base, site, inner);
      }
      if (auto s = x->as<ScalarSubquery>()) return Expr{ScalarSubquery{QueryPtr(rewriteQuery(*s->query))}};
      if (auto s = x->as<Exists>()) return Expr{Exists{QueryPtr(rewriteQuery(*s->query))}};
      return std::nullopt;
   });
}

bool Rewriter::overItemOnly(const Expr& e, const ScopeInfo& scope, size_t item) {
   bool any = false, other = false;
   std::function<void(const Expr&)> walk = [&](const Expr& x) {
      if (x.is<ColumnRef>()) {
         auto info = r_.find(x);
         if (info && info->column && info->column->scope == &scope && info->column->item == item)
            any = true;
         else
            other = true;
      } else if (auto u = x.as<Unary>()) {
         walk(*u->operand);
      } else if (auto b = x.as<Binary>()) {
         walk(*b->left);
         walk(*b->right);
      } else if (auto f = x.as<FunctionCall>()) {
         for (auto& a : f->args) walk(*a);
      } else if (!x.is<Literal>()) {
         other = true;
      }
   };
   walk(e);
   return any && !other;
}

ExprPtr Rewriter::toDimensionSpace(const ExprPtr& e, const ScopeInfo& scope, size_t item) {
   return rewrite(e, [&](const ExprPtr& x) -> std::optional<ExprPtr> {
      if (!x->is<ColumnRef>()) return std::nullopt;
      auto info = r_.find(*x);
      if (info && info->column && info->column->scope == &scope && info->column->item == item)
         return column("", scope.items[item].columns[info->column->column].name);
      return x;
   });
}

CallSite Rewriter::callSite(const Site& site, size_t item) {
   const ScopeInfo& s = *site.scope;
   CallSite cs;
   cs.grouped = s.grouped && !site.whereClause;
   cs.rollup = s.rollup;
   cs.measureAlias = s.items[item].alias;
   cs.dimensions = s.items[item].dimensions();
   if (cs.grouped)
      for (auto& k : s.keys) {
         cs.keys.push_back(k);
         if (overItemOnly(*k, s, item))
            cs.keyDimensions.push_back(toDimensionSpace(k, s, item));
         else
            cs.keyDimensions.push_back(std::nullopt);
      }
   return cs;
}

std::vector<ContextTerm> Rewriter::visibleTerms(const Site& site, size_t item, const CallSite& cs) {
   const ScopeInfo& s = *site.scope;
   const Select& select = *site.select;
   if (s.items.size() == 1) {
      if (!select.where) return {};
      return {ContextTerm{Pred{toDimensionSpace(*select.where, s, item)}, TermOrigin::VisibleWhere}};
   }
   // Replicate the FROM clause so the measure's rows can be tested for participation
   AliasMap m;
   for (auto& it : s.items) m[it.alias] = fresh(it.alias);
   std::vector<TableExpr> from;
   for (auto& t : select.from) from.push_back(renameTopLevel(rewriteTable(t, s, select), m));
   std::vector<ExprPtr> conds;
   auto& measureItem = s.items[item];
   for (auto& d : measureItem.dimensions()) conds.push_back(binary(BinaryOp::IsNotDistinctFrom, column("", d), column(m[measureItem.alias], d)));
   if (select.where) conds.push_back(rename(rewriteExpr(*select.where, Site{&s, &select, true}, {}), m));
   if (cs.grouped)
      for (size_t k = 0; k < cs.keys.size(); ++k) {
         if (cs.keyDimensions[k]) continue;
         ExprPtr test = binary(BinaryOp::IsNotDistinctFrom, rename(cs.keys[k], m), cs.keys[k]);
         if (cs.rollup) test = binary(BinaryOp::Or, binary(BinaryOp::Eq, function("GROUPING", {cs.keys[k]}), literal(Value(1))), test);
         conds.push_back(test);
      }
   Query q;
   q.select.items.push_back(SelectItem{literal(Value(1)), "one", false});
   q.select.from = std::move(from);
   auto flat = flatConjuncts(conds);
   if (!flat.empty()) q.select.where = conjunction(flat);
   return {ContextTerm{Pred{exists(std::move(q))}, TermOrigin::VisibleJoin}};
}

ExprPtr Rewriter::expandMeasure(const ExprPtr& ref, const Site& site, const std::vector<ContextModifier>& stack) {
   auto& info = r_.info(*ref);
   const ScopeInfo& s = *info.column->scope;
   size_t itemIndex = info.column->item;
   const FromItem& item = s.items[itemIndex];
   const std::string& measure = item.columns[info.column->column].name;
   if (!item.source) throw Error(ErrorCode::Analysis, "measure " + measure + " has no defining query");
   const Query& def = **item.source;
   const ScopeInfo& defScope = r_.scope(def.select);
   const SelectItem* formula = nullptr;
   for (auto& entry : def.select.items)
      if (auto& si = std::get<SelectItem>(entry); si.isMeasure && iequals(si.alias, measure)) formula = &si;
   if (!formula) throw Error(ErrorCode::NotAMeasure, measure + " is not defined as a measure");

   AliasMap m;
   for (auto& di : defScope.items) m[di.alias] = fresh("i");
   std::vector<TableExpr> from;
   for (auto& t : def.select.from) from.push_back(renameTopLevel(rewriteTable(t, defScope, def.select), m));

   CallSite cs = callSite(site, itemIndex);
   for (auto& mod : stack)
      if (std::holds_alternative<Visible>(mod)) {
         cs.visibleTerms = visibleTerms(site, itemIndex, cs);
         break;
      }
   EvaluationContext ctx = applySequence(implicitContext(cs), stack, cs);

   Site defSite{&defScope, &def.select, false};
   auto substitute = [&](const std::string& d) -> ExprPtr {
      for (auto& entry : def.select.items)
         if (auto& si = std::get<SelectItem>(entry); !si.isMeasure && iequals(si.alias, d)) return rename(rewriteExpr(si.expr, defSite, {}), m);
      throw Error(ErrorCode::Analysis, "dimension " + d + " has no definition");
   };
   std::vector<ExprPtr> where;
   if (def.select.where) where.push_back(rename(rewriteExpr(*def.select.where, Site{&defScope, &def.select, true}, {}), m));
   where.push_back(toRowPredicate(ctx, substitute));

   Query sub;
   sub.select.items.push_back(SelectItem{rename(formula->expr, m), measure, false});
   sub.select.from = std::move(from);
   auto flat = flatConjuncts(where);
   if (!flat.empty()) sub.select.where = conjunction(flat);
   QueryPtr subquery(std::move(sub));

   std::string reference = stack.empty() ? print(*ref) : print(Expr{AtExpr{ref, stack}});
   notes.push_back(RewriteNote{reference, measure, describe(ctx), subquery});
   return Expr{ScalarSubquery{subquery}};
}

}

RewriteOutput expand(const ResolvedQuery& resolved) {
   Rewriter rewriter(resolved);
   Query q = rewriter.rewriteQuery(*resolved.query);
   return RewriteOutput{QueryPtr(std::move(q)), std::move(rewriter.notes)};
}

}
