#pragma once

#include "measql/ast.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace measql {

// Contexts are symbolic. Dimensions are written in "dimension space": an
// unqualified column reference names a dimension column of the measure's
// table; every other column reference is qualified and refers to the call site.

enum class TermOrigin { GroupKey, SetModifier, WhereModifier, VisibleWhere, VisibleJoin };

std::string_view toString(TermOrigin origin);

/// dimension IS NOT DISTINCT FROM value; under ROLLUP the term only holds
/// while GROUPING(rollupKey) = 0
struct DimEquals {
   ast::ExprPtr dimension;
   ast::ExprPtr value;
   std::optional<ast::ExprPtr> rollupKey;
   bool operator==(const DimEquals&) const = default;
};

struct Pred {
   ast::ExprPtr predicate;
   bool operator==(const Pred&) const = default;
};

struct ContextTerm {
   std::variant<DimEquals, Pred> term;
   TermOrigin origin;
   bool operator==(const ContextTerm&) const = default;
};

struct EvaluationContext {
   std::vector<ContextTerm> terms;
   /// VISIBLE already contributed its terms
   bool visibleApplied = false;

   bool isTrue() const { return terms.empty(); }
   bool operator==(const EvaluationContext&) const = default;
};

/// What the call site of a measure reference contributes
struct CallSite {
   /// Evaluated per group (select list, HAVING, ORDER BY of a grouped query)
   bool grouped = false;
   bool rollup = false;
   /// Group keys as written at the call site
   std::vector<ast::ExprPtr> keys;
   /// Dimension-space form of each key that is over the measure's table only
   std::vector<std::optional<ast::ExprPtr>> keyDimensions;
   /// Alias of the FROM item that carries the measure, and its dimensions
   std::string measureAlias;
   std::vector<std::string> dimensions;
   /// Terms added by VISIBLE
   std::vector<ContextTerm> visibleTerms;
};

EvaluationContext implicitContext(const CallSite& site);
EvaluationContext applyModifier(const EvaluationContext& ctx, const ast::ContextModifier& m, const CallSite& site);
EvaluationContext applySequence(EvaluationContext ctx, const std::vector<ast::ContextModifier>& mods, const CallSite& site);
/// Expression for the single value the context binds to a dimension; NULL literal if none
ast::ExprPtr currentValue(const EvaluationContext& ctx, const ast::ExprPtr& dimension);

/// Maps a dimension column name to the expression that computes it for a source row
using DimensionSubstitution = std::function<ast::ExprPtr(const std::string&)>;

/// The context as a boolean expression over the source row; literal TRUE when empty
ast::ExprPtr toRowPredicate(const EvaluationContext& ctx, const DimensionSubstitution& substitute);
ast::ExprPtr toRowPredicate(const EvaluationContext& ctx, const std::string& rowAlias);

/// Replaces dimension references (unqualified columns) in a dimension-space expression
ast::ExprPtr substituteDimensions(const ast::ExprPtr& e, const DimensionSubstitution& substitute);

std::string describe(const EvaluationContext& ctx);

}
