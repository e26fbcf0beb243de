#pragma once

#include "measql/value.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace measql::ast {

/// Immutable shared node handle. Copies share the node; equality is deep.
template <class T>
class Box {
   public:
   Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}

   const T& operator*() const { return *ptr_; }
   const T* operator->() const { return ptr_.get(); }
   const T* get() const { return ptr_.get(); }

   bool operator==(const Box& other) const { return ptr_ == other.ptr_ || *ptr_ == *other.ptr_; }

   private:
   std::shared_ptr<const T> ptr_;
};

struct Expr;
struct Query;
struct TableExpr;
using ExprPtr = Box<Expr>;
using QueryPtr = Box<Query>;

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, IsNotDistinctFrom };
enum class UnaryOp { Not, Neg };
enum class AggregateFn { Sum, Count, CountStar, Avg };
enum class JoinKind { Inner, Left };

std::string_view toString(BinaryOp op);
std::string_view toString(AggregateFn fn);

//---------------------------------------------------------------------------
// Expressions

/// A column reference; an empty qualifier means unqualified.
struct ColumnRef {
   std::string qualifier;
   std::string name;
   bool operator==(const ColumnRef&) const = default;
};

struct Literal {
   Value value;
   bool operator==(const Literal&) const = default;
};

struct Unary {
   UnaryOp op;
   ExprPtr operand;
   bool operator==(const Unary&) const = default;
};

struct Binary {
   BinaryOp op;
   ExprPtr left;
   ExprPtr right;
   bool operator==(const Binary&) const = default;
};

/// Scalar function call: YEAR, GROUPING
struct FunctionCall {
   std::string name;
   std::vector<ExprPtr> args;
   bool operator==(const FunctionCall&) const = default;
};

/// SUM/COUNT/AVG(arg) or COUNT(*) (no argument)
struct AggregateCall {
   AggregateFn fn;
   std::optional<ExprPtr> arg;
   bool operator==(const AggregateCall&) const = default;
};

/// agg(arg) OVER (PARTITION BY ...)
struct WindowCall {
   AggregateFn fn;
   std::optional<ExprPtr> arg;
   std::vector<ExprPtr> partitionBy;
   bool operator==(const WindowCall&) const = default;
};

/// AGGREGATE(measure)
struct AggregateMeasureCall {
   ExprPtr operand;
   bool operator==(const AggregateMeasureCall&) const = default;
};

// Context modifiers inside AT (...)
struct AllBare {
   bool operator==(const AllBare&) const = default;
};
struct AllDims {
   std::vector<ExprPtr> dimensions;
   bool operator==(const AllDims&) const = default;
};
struct SetDim {
   ExprPtr dimension;
   ExprPtr value;
   bool operator==(const SetDim&) const = default;
};
struct Visible {
   bool operator==(const Visible&) const = default;
};
struct WherePred {
   ExprPtr predicate;
   bool operator==(const WherePred&) const = default;
};
using ContextModifier = std::variant<AllBare, AllDims, SetDim, Visible, WherePred>;

/// cse AT (modifiers); the modifier list is never empty
struct AtExpr {
   ExprPtr base;
   std::vector<ContextModifier> modifiers;
   bool operator==(const AtExpr&) const = default;
};

/// CURRENT dimension
struct CurrentRef {
   ExprPtr dimension;
   bool operator==(const CurrentRef&) const = default;
};

struct ScalarSubquery {
   QueryPtr query;
   bool operator==(const ScalarSubquery&) const = default;
};

struct Exists {
   QueryPtr query;
   bool operator==(const Exists&) const = default;
};

struct Expr {
   std::variant<ColumnRef, Literal, Unary, Binary, FunctionCall, AggregateCall, WindowCall, AggregateMeasureCall, AtExpr, CurrentRef, ScalarSubquery, Exists> node;
   bool operator==(const Expr&) const = default;

   template <class T>
   const T* as() const { return std::get_if<T>(&node); }
   template <class T>
   bool is() const { return std::holds_alternative<T>(node); }
};

//---------------------------------------------------------------------------
// Queries

struct SelectItem {
   ExprPtr expr;
   std::string alias;
   bool isMeasure = false;
   bool operator==(const SelectItem&) const = default;
};

/// * or qualifier.*
struct StarItem {
   std::string qualifier;
   bool operator==(const StarItem&) const = default;
};

using SelectEntry = std::variant<SelectItem, StarItem>;

struct TableRef {
   std::string name;
   std::string alias;
   bool operator==(const TableRef&) const = default;
};

struct SubqueryRef {
   QueryPtr query;
   std::string alias;
   bool operator==(const SubqueryRef&) const = default;
};

struct Join {
   JoinKind kind = JoinKind::Inner;
   Box<TableExpr> left;
   Box<TableExpr> right;
   std::optional<ExprPtr> on;
   std::vector<std::string> usingColumns;
   bool operator==(const Join&) const = default;
};

struct TableExpr {
   std::variant<TableRef, SubqueryRef, Join> node;
   bool operator==(const TableExpr&) const = default;

   template <class T>
   const T* as() const { return std::get_if<T>(&node); }
};

/// GROUP BY keys or GROUP BY ROLLUP(keys); empty keys print as GROUP BY ()
struct GroupBy {
   bool rollup = false;
   std::vector<ExprPtr> keys;
   bool operator==(const GroupBy&) const = default;
};

struct OrderItem {
   ExprPtr expr;
   bool descending = false;
   bool operator==(const OrderItem&) const = default;
};

struct Select {
   std::vector<SelectEntry> items;
   /// Comma-separated FROM entries; several entries form a cross product
   std::vector<TableExpr> from;
   std::optional<ExprPtr> where;
   std::optional<GroupBy> groupBy;
   std::optional<ExprPtr> having;
   bool operator==(const Select&) const = default;
};

struct CommonTableExpr {
   std::string name;
   QueryPtr query;
   bool operator==(const CommonTableExpr&) const = default;
};

struct Query {
   std::vector<CommonTableExpr> with;
   Select select;
   std::vector<OrderItem> orderBy;
   bool operator==(const Query&) const = default;
};

//---------------------------------------------------------------------------
// Statements

struct ColumnDecl {
   std::string name;
   ScalarType type;
   bool operator==(const ColumnDecl&) const = default;
};

struct CreateTable {
   std::string name;
   std::vector<ColumnDecl> columns;
   bool operator==(const CreateTable&) const = default;
};

struct CreateView {
   std::string name;
   QueryPtr query;
   bool operator==(const CreateView&) const = default;
};

struct Statement {
   std::variant<Query, CreateTable, CreateView> node;
   bool operator==(const Statement&) const = default;

   template <class T>
   const T* as() const { return std::get_if<T>(&node); }
};

//---------------------------------------------------------------------------
// Construction helpers

ExprPtr column(std::string qualifier, std::string name);
ExprPtr literal(Value v);
ExprPtr binary(BinaryOp op, ExprPtr left, ExprPtr right);
ExprPtr unary(UnaryOp op, ExprPtr operand);
ExprPtr function(std::string name, std::vector<ExprPtr> args);
ExprPtr aggregate(AggregateFn fn, std::optional<ExprPtr> arg);
ExprPtr scalarSubquery(Query q);
ExprPtr exists(Query q);
/// Left-deep AND of the operands; literal TRUE when empty
ExprPtr conjunction(const std::vector<ExprPtr>& operands);
/// Splits a tree of ANDs into its conjuncts
std::vector<ExprPtr> conjuncts(const ExprPtr& e);

bool isLiteralTrue(const Expr& e);

/// Pre-order rewrite. When fn returns a node it replaces the visited one and is not
/// descended into; otherwise the children are rewritten. Descends into subqueries.
using ExprRewriter = std::function<std::optional<ExprPtr>(const ExprPtr&)>;
ExprPtr rewrite(const ExprPtr& e, const ExprRewriter& fn);
Query rewrite(const Query& q, const ExprRewriter& fn);
TableExpr rewrite(const TableExpr& t, const ExprRewriter& fn);

/// Whether the expression contains measure-language nodes (AGGREGATE, AT, CURRENT)
bool containsExtensionNodes(const Expr& e);
bool containsExtensionNodes(const Query& q);
bool containsMeasureDecl(const Query& q);

}
