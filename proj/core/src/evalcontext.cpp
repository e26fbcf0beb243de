#include "measql/evalcontext.hpp"

#include "measql/names.hpp"
#include "measql/printer.hpp"

namespace measql {

using namespace ast;

std::string_view toString(TermOrigin origin) {
   switch (origin) {
      case TermOrigin::GroupKey: return "group key";
      case TermOrigin::SetModifier: return "SET";
      case TermOrigin::WhereModifier: return "WHERE";
      case TermOrigin::VisibleWhere: return "VISIBLE where";
      case TermOrigin::VisibleJoin: return "VISIBLE join";
   }
   return "?";
}

EvaluationContext implicitContext(const CallSite& site) {
   EvaluationContext ctx;
   if (site.grouped) {
      for (size_t i = 0; i < site.keys.size(); ++i) {
         if (!site.keyDimensions[i]) continue;
         std::optional<ExprPtr> guard;
         if (site.rollup) guard = site.keys[i];
         ctx.terms.push_back(ContextTerm{DimEquals{*site.keyDimensions[i], site.keys[i], guard}, TermOrigin::GroupKey});
      }
   } else {
      for (auto& d : site.dimensions)
         ctx.terms.push_back(ContextTerm{DimEquals{column("", d), column(site.measureAlias, d), std::nullopt}, TermOrigin::GroupKey});
   }
   return ctx;
}

static void removeDimension(EvaluationContext& ctx, const ExprPtr& dimension) {
   std::erase_if(ctx.terms, [&](const ContextTerm& t) {
      auto eq = std::get_if<DimEquals>(&t.term);
      return eq && eq->dimension == dimension;
   });
}

static ExprPtr replaceCurrent(const ExprPtr& e, const EvaluationContext& ctx) {
   return rewrite(e, [&](const ExprPtr& x) -> std::optional<ExprPtr> {
      if (auto c = x->as<CurrentRef>()) return currentValue(ctx, c->dimension);
      return std::nullopt;
   });
}

EvaluationContext applyModifier(const EvaluationContext& ctx, const ContextModifier& m, const CallSite& site) {
   EvaluationContext out = ctx;
   if (std::holds_alternative<AllBare>(m)) {
      out.terms.clear();
   } else if (auto all = std::get_if<AllDims>(&m)) {
      for (auto& d : all->dimensions) removeDimension(out, d);
   } else if (auto set = std::get_if<SetDim>(&m)) {
      ExprPtr value = replaceCurrent(set->value, ctx);
      removeDimension(out, set->dimension);
      out.terms.push_back(ContextTerm{DimEquals{set->dimension, value, std::nullopt}, TermOrigin::SetModifier});
   } else if (std::holds_alternative<Visible>(m)) {
      if (!out.visibleApplied) {
         out.terms.insert(out.terms.end(), site.visibleTerms.begin(), site.visibleTerms.end());
         out.visibleApplied = true;
      }
   } else {
      out.terms.assign(1, ContextTerm{Pred{std::get<WherePred>(m).predicate}, TermOrigin::WhereModifier});
   }
   return out;
}

EvaluationContext applySequence(EvaluationContext ctx, const std::vector<ContextModifier>& mods, const CallSite& site) {
   for (auto& m : mods) ctx = applyModifier(ctx, m, site);
   return ctx;
}

ExprPtr currentValue(const EvaluationContext& ctx, const ExprPtr& dimension) {
   for (auto it = ctx.terms.rbegin(); it != ctx.terms.rend(); ++it) {
      if (auto eq = std::get_if<DimEquals>(&it->term)) {
         if (eq->dimension == dimension) return eq->value;
         continue;
      }
      for (auto& c : conjuncts(std::get<Pred>(it->term).predicate)) {
         auto b = c->as<Binary>();
         if (!b || (b->op != BinaryOp::Eq && b->op != BinaryOp::IsNotDistinctFrom)) continue;
         if (b->left == dimension && !b->right->is<ColumnRef>()) return b->right;
         if (b->left == dimension) {
            auto r = b->right->as<ColumnRef>();
            if (!r->qualifier.empty()) return b->right;
         }
      }
   }
   return literal(Value());
}

ExprPtr substituteDimensions(const ExprPtr& e, const DimensionSubstitution& substitute) {
   return rewrite(e, [&](const ExprPtr& x) -> std::optional<ExprPtr> {
      if (auto c = x->as<ColumnRef>(); c && c->qualifier.empty()) return substitute(c->name);
      return std::nullopt;
   });
}

ExprPtr toRowPredicate(const EvaluationContext& ctx, const DimensionSubstitution& substitute) {
   std::vector<ExprPtr> parts;
   for (auto& t : ctx.terms) {
      if (auto eq = std::get_if<DimEquals>(&t.term)) {
         ExprPtr test = binary(BinaryOp::IsNotDistinctFrom, substituteDimensions(eq->dimension, substitute), eq->value);
         if (eq->rollupKey) test = binary(BinaryOp::Or, binary(BinaryOp::Eq, function("GROUPING", {*eq->rollupKey}), literal(Value(1))), test);
         parts.push_back(test);
      } else {
         auto& p = std::get<Pred>(t.term).predicate;
         if (!isLiteralTrue(*p)) parts.push_back(substituteDimensions(p, substitute));
      }
   }
   return conjunction(parts);
}

ExprPtr toRowPredicate(const EvaluationContext& ctx, const std::string& rowAlias) {
   return toRowPredicate(ctx, [&](const std::string& d) { return column(rowAlias, d); });
}

std::string describe(const EvaluationContext& ctx) {
   if (ctx.isTrue()) return "TRUE";
   std::string out;
   for (auto& t : ctx.terms) {
      if (!out.empty()) out += " AND ";
      if (auto eq = std::get_if<DimEquals>(&t.term))
         out += print(*eq->dimension) + " = " + print(*eq->value);
      else
         out += "(" + print(*std::get<Pred>(t.term).predicate) + ")";
      out += " [" + std::string(toString(t.origin)) + "]";
   }
   return out;
}

}
