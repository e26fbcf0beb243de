#pragma once

#include "measql/ast.hpp"
#include "measql/catalog.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace measql {

struct ColumnInfo {
   std::string name;
   /// Empty for an untyped NULL
   std::optional<ScalarType> type;
   bool isMeasure = false;
};

/// A FROM item after resolution. Its columns occupy [offset, offset + columns.size()) of the scope row.
struct FromItem {
   std::string alias;
   std::vector<ColumnInfo> columns;
   size_t offset = 0;
   /// Base table name; empty for derived tables
   std::string baseTable;
   /// Normalized body of a derived table
   std::optional<ast::QueryPtr> source;
   /// Right side of a LEFT JOIN
   bool nullable = false;

   bool hasMeasures() const;
   std::optional<size_t> findColumn(std::string_view name) const;
   /// Names of the non-measure columns
   std::vector<std::string> dimensions() const;
};

/// Per-SELECT resolution result
struct ScopeInfo {
   const ScopeInfo* parent = nullptr;
   std::vector<FromItem> items;
   size_t width = 0;
   bool grouped = false;
   bool rollup = false;
   /// True when grouped only because of AGGREGATE calls
   bool groupedByAggregateSugar = false;
   /// Normalized group keys; the same nodes appear in the Select
   std::vector<ast::ExprPtr> keys;
   std::vector<ColumnInfo> output;

   /// Index of the item owning a slot
   size_t itemOfSlot(size_t slot) const;
};

struct ColumnBinding {
   /// Scope hops outward from the referencing expression
   unsigned depth = 0;
   const ScopeInfo* scope = nullptr;
   size_t item = 0;
   size_t column = 0;
   size_t slot = 0;
};

struct GroupKeyRef {
   unsigned depth = 0;
   size_t index = 0;
};

enum class MeasureSite { GroupedSelect, UngroupedSelect, Where, AtBase };

struct ExprInfo {
   std::optional<ScalarType> type;
   /// Value of type `t MEASURE`
   bool isMeasure = false;
   std::optional<ColumnBinding> column;
   /// Unqualified reference to a measure dimension inside AT modifiers
   bool dimension = false;
   /// Evaluated as this group key of an enclosing grouped scope
   std::optional<GroupKeyRef> groupKey;
   /// Call-site kind of a measure reference
   std::optional<MeasureSite> site;
   /// Key tested by a GROUPING call
   std::optional<GroupKeyRef> groupingOf;
};

struct Annotations {
   std::unordered_map<const ast::Expr*, ExprInfo> exprs;
   std::unordered_map<const ast::Select*, std::unique_ptr<ScopeInfo>> scopes;
   /// ORDER BY items naming an output column
   std::unordered_map<const ast::OrderItem*, size_t> orderOutput;
};

/// Normalized query plus annotations. Every column reference is qualified,
/// every FROM item aliased, views and CTEs are inlined, stars expanded, USING
/// turned into ON, sibling measures inlined. Dimensions inside AT modifiers
/// are unqualified column references.
struct ResolvedQuery {
   ast::QueryPtr query;
   std::vector<ColumnInfo> columns;
   std::shared_ptr<const Annotations> annotations;

   const ScopeInfo& scope(const ast::Select& select) const;
   const ExprInfo& info(const ast::Expr& e) const;
   const ExprInfo* find(const ast::Expr& e) const;
};

ResolvedQuery analyze(const ast::Query& query, const Catalog& catalog);

/// Rejects non-measure column references of the defining scope outside aggregate arguments
void checkMeasureFormula(const ast::Expr& formula, const ScopeInfo& scope, const Annotations& annotations);

/// Name a select item gets when it has no alias
std::string defaultOutputName(const ast::Expr& e, size_t index);

}
