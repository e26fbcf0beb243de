#include "measql/analyzer.hpp"

#include "measql/error.hpp"
#include "measql/names.hpp"

#include <map>
#include <set>

namespace measql {

using namespace ast;

bool FromItem::hasMeasures() const {
   for (auto& c : columns)
      if (c.isMeasure) return true;
   return false;
}

std::optional<size_t> FromItem::findColumn(std::string_view name) const {
   for (size_t i = 0; i < columns.size(); ++i)
      if (iequals(columns[i].name, name)) return i;
   return std::nullopt;
}

std::vector<std::string> FromItem::dimensions() const {
   std::vector<std::string> out;
   for (auto& c : columns)
      if (!c.isMeasure) out.push_back(c.name);
   return out;
}

size_t ScopeInfo::itemOfSlot(size_t slot) const {
   for (size_t i = 0; i < items.size(); ++i)
      if (slot >= items[i].offset && slot < items[i].offset + items[i].columns.size()) return i;
   throw Error(ErrorCode::Analysis, "slot out of range");
}

const ScopeInfo& ResolvedQuery::scope(const Select& select) const {
   auto it = annotations->scopes.find(&select);
   if (it == annotations->scopes.end()) throw Error(ErrorCode::Analysis, "select was not analyzed");
   return *it->second;
}

const ExprInfo& ResolvedQuery::info(const Expr& e) const {
   if (auto i = find(e)) return *i;
   throw Error(ErrorCode::Analysis, "expression was not analyzed");
}

const ExprInfo* ResolvedQuery::find(const Expr& e) const {
   auto it = annotations->exprs.find(&e);
   return it == annotations->exprs.end() ? nullptr : &it->second;
}

std::string defaultOutputName(const Expr& e, size_t index) {
   if (auto c = e.as<ColumnRef>()) return c->name;
   if (auto a = e.as<AggregateCall>()) return toLower(toString(a->fn));
   if (auto w = e.as<WindowCall>()) return toLower(toString(w->fn));
   if (auto m = e.as<AggregateMeasureCall>()) {
      if (m->operand->is<ColumnRef>() || m->operand->is<AtExpr>()) return defaultOutputName(*m->operand, index);
   }
   if (auto at = e.as<AtExpr>()) {
      if (at->base->is<ColumnRef>() || at->base->is<AtExpr>()) return defaultOutputName(*at->base, index);
   }
   return "EXPR$" + std::to_string(index);
}

namespace {

bool numeric(std::optional<ScalarType> t) { return !t || isNumeric(*t); }

bool compatible(std::optional<ScalarType> a, std::optional<ScalarType> b) {
   if (!a || !b || a == b) return true;
   return isNumeric(*a) && isNumeric(*b);
}

std::string typeName(std::optional<ScalarType> t) { return t ? std::string(toString(*t)) : "NULL"; }

/// Aggregates that make a select grouped; nested queries do not count
bool containsOwnAggregate(const Expr& e) {
   return std::visit(
      [](const auto& n) -> bool {
         using T = std::decay_t<decltype(n)>;
         if constexpr (std::is_same_v<T, AggregateCall> || std::is_same_v<T, AggregateMeasureCall>) {
            return true;
         } else if constexpr (std::is_same_v<T, Unary>) {
            return containsOwnAggregate(*n.operand);
         } else if constexpr (std::is_same_v<T, Binary>) {
            return containsOwnAggregate(*n.left) || containsOwnAggregate(*n.right);
         } else if constexpr (std::is_same_v<T, FunctionCall>) {
            for (auto& a : n.args)
               if (containsOwnAggregate(*a)) return true;
            return false;
         } else if constexpr (std::is_same_v<T, AtExpr>) {
            return containsOwnAggregate(*n.base);
         } else {
            return false;
         }
      },
      e.node);
}

bool containsAggregateCall(const Expr& e) {
   if (e.is<AggregateCall>()) return true;
   if (auto u = e.as<Unary>()) return containsAggregateCall(*u->operand);
   if (auto b = e.as<Binary>()) return containsAggregateCall(*b->left) || containsAggregateCall(*b->right);
   if (auto f = e.as<FunctionCall>()) {
      for (auto& a : f->args)
         if (containsAggregateCall(*a)) return true;
   }
   if (auto at = e.as<AtExpr>()) return containsAggregateCall(*at->base);
   return false;
}

struct CteEnv {
   const CteEnv* parent;
   std::string name;
   QueryPtr query;
};

enum class Clause { Select, Where, GroupBy, Having, OrderBy, On, Measure, Partition };
enum class DimMode { None, Only, First };

struct SelectState {
   SelectState(ScopeInfo* s, const Select* r, const CteEnv* c) : scope(s), raw(r), ctes(c) {}

   ScopeInfo* scope;
   const Select* raw;
   const CteEnv* ctes;
   bool whereHasMeasures = false;
   std::map<std::string, ExprPtr, CaseInsensitiveLess> inlinedMeasures;
   std::set<std::string, CaseInsensitiveLess> measuresInProgress;
   std::set<std::string, CaseInsensitiveLess> dimAliasesInProgress;
};

struct Ctx {
   Ctx(SelectState* s, Clause c) : state(s), clause(c) {}

   SelectState* state;
   Clause clause;
   bool insideAggregate = false;
   bool insideWindow = false;
   bool inModifier = false;
   bool allowCurrent = false;
   unsigned atDepth = 0;
   bool explicitContext = false;
   DimMode dimMode = DimMode::None;
   std::optional<size_t> dimItem;
   std::set<size_t>* measureItems = nullptr;
};

struct QueryResult {
   QueryPtr query;
   std::vector<ColumnInfo> columns;
};

class Analyzer {
   public:
   explicit Analyzer(const Catalog& catalog) : catalog_(catalog), ann_(std::make_shared<Annotations>()) {}

   QueryResult analyzeQuery(const Query& q, const ScopeInfo* parent, const CteEnv* ctes);
   void validateGroupingCalls();
   std::shared_ptr<Annotations> annotations() { return ann_; }

   private:
   struct Resolved {
      const ScopeInfo* scope;
      unsigned depth;
      size_t item;
      size_t column;
   };

   ExprPtr record(Expr node, ExprInfo info) {
      ExprPtr p(std::move(node));
      ann_->exprs[p.get()] = std::move(info);
      return p;
   }
   const ExprInfo& infoOf(const ExprPtr& e) { return ann_->exprs.at(e.get()); }
   std::optional<ScalarType> typeOf(const ExprPtr& e) { return infoOf(e).type; }

   TableExpr analyzeTable(const TableExpr& t, SelectState& st, std::set<size_t>& hiddenForStar);
   void addItem(SelectState& st, FromItem item);
   ExprPtr analyzeExpr(const Expr& e, Ctx& ctx);
   ExprPtr analyzeColumn(const ColumnRef& c, Ctx& ctx);
   ExprPtr analyzeDimension(const ColumnRef& c, Ctx& ctx);
   ExprPtr analyzeMeasureItem(const std::string& alias, SelectState& st);
   ExprPtr analyzeAt(const AtExpr& at, Ctx& ctx);
   ExprPtr analyzeFunction(const FunctionCall& f, Ctx& ctx);
   std::optional<Resolved> resolveColumn(const ColumnRef& c, const ScopeInfo* scope);
   void requireBoolean(const ExprPtr& e, std::string_view where);

   bool keyMatches(const Expr& a, const Expr& b);
   void markGroupKeys(const ExprPtr& e, const ScopeInfo* current, const ScopeInfo& grouped);
   void markQuery(const Query& q, const ScopeInfo& grouped);
   void markTable(const TableExpr& t, const ScopeInfo* current, const ScopeInfo& grouped);

   const Catalog& catalog_;
   std::shared_ptr<Annotations> ann_;
   unsigned derivedCounter_ = 0;
   std::unordered_map<const ScopeInfo*, std::map<std::string, size_t, CaseInsensitiveLess>> usingSlots_;
   struct GroupingCall {
      ExprPtr node;
      const ScopeInfo* scope;
      bool preGrouping;
   };
   std::vector<GroupingCall> groupingCalls_;
};

unsigned hops(const ScopeInfo* from, const ScopeInfo* to) {
   unsigned n = 0;
   for (auto s = from; s; s = s->parent, ++n)
      if (s == to) return n;
   throw Error(ErrorCode::Analysis, "scope is not enclosing");
}

//---------------------------------------------------------------------------
// FROM clause

void Analyzer::addItem(SelectState& st, FromItem item) {
   for (auto& existing : st.scope->items)
      if (iequals(existing.alias, item.alias)) throw Error(ErrorCode::DuplicateName, "table alias " + item.alias + " is used twice");
   item.offset = st.scope->width;
   st.scope->width += item.columns.size();
   st.scope->items.push_back(std::move(item));
}

TableExpr Analyzer::analyzeTable(const TableExpr& t, SelectState& st, std::set<size_t>& hiddenForStar) {
   if (auto ref = t.as<TableRef>()) {
      for (auto env = st.ctes; env; env = env->parent) {
         if (!iequals(env->name, ref->name)) continue;
         auto body = analyzeQuery(*env->query, st.scope->parent, env->parent);
         FromItem item{ref->alias.empty() ? env->name : ref->alias, body.columns, 0, {}, body.query, false};
         std::string alias = item.alias;
         addItem(st, std::move(item));
         return TableExpr{SubqueryRef{body.query, alias}};
      }
      const TableSchema& schema = catalog_.resolve(ref->name);
      std::string alias = ref->alias.empty() ? schema.name : ref->alias;
      if (schema.isView()) {
         auto body = analyzeQuery(**schema.viewQuery, nullptr, nullptr);
         addItem(st, FromItem{alias, body.columns, 0, {}, body.query, false});
         return TableExpr{SubqueryRef{body.query, alias}};
      }
      FromItem item{alias, {}, 0, schema.name, std::nullopt, false};
      for (auto& c : schema.columns) item.columns.push_back(ColumnInfo{c.name, c.type, false});
      addItem(st, std::move(item));
      return TableExpr{TableRef{schema.name, alias}};
   }
   if (auto sub = t.as<SubqueryRef>()) {
      auto body = analyzeQuery(*sub->query, st.scope->parent, st.ctes);
      std::string alias = sub->alias.empty() ? "t$" + std::to_string(derivedCounter_++) : sub->alias;
      addItem(st, FromItem{alias, body.columns, 0, {}, body.query, false});
      return TableExpr{SubqueryRef{body.query, alias}};
   }
   auto& join = *t.as<Join>();
   size_t leftBegin = st.scope->items.size();
   TableExpr left = analyzeTable(*join.left, st, hiddenForStar);
   size_t rightBegin = st.scope->items.size();
   TableExpr right = analyzeTable(*join.right, st, hiddenForStar);
   size_t rightEnd = st.scope->items.size();
   if (join.kind == JoinKind::Left)
      for (size_t i = rightBegin; i < rightEnd; ++i) st.scope->items[i].nullable = true;

   std::optional<ExprPtr> on;
   if (join.on) {
      Ctx ctx{&st, Clause::On};
      on = analyzeExpr(**join.on, ctx);
      requireBoolean(*on, "ON");
   } else if (!join.usingColumns.empty()) {
      std::vector<ExprPtr> terms;
      auto locate = [&](size_t begin, size_t end, const std::string& name) -> std::pair<size_t, size_t> {
         for (size_t i = begin; i < end; ++i)
            if (auto c = st.scope->items[i].findColumn(name); c && !st.scope->items[i].columns[*c].isMeasure) return {i, *c};
         throw Error(ErrorCode::UnknownColumn, "USING column " + name + " not found on both sides of the join");
      };
      for (auto& name : join.usingColumns) {
         auto [li, lc] = locate(leftBegin, rightBegin, name);
         auto [ri, rc] = locate(rightBegin, rightEnd, name);
         auto& l = st.scope->items[li];
         auto& r = st.scope->items[ri];
         if (!compatible(l.columns[lc].type, r.columns[rc].type)) throw Error(ErrorCode::TypeMismatch, "USING column " + name + " has incompatible types");
         auto side = [&](const FromItem& item, size_t itemIndex, size_t col) {
            ExprInfo info;
            info.type = item.columns[col].type;
            info.column = ColumnBinding{0, st.scope, itemIndex, col, item.offset + col};
            return record(Expr{ColumnRef{item.alias, item.columns[col].name}}, info);
         };
         ExprInfo eq;
         eq.type = ScalarType::Boolean;
         terms.push_back(record(Expr{Binary{BinaryOp::Eq, side(l, li, lc), side(r, ri, rc)}}, eq));
         usingSlots_[st.scope][l.columns[lc].name] = l.offset + lc;
         hiddenForStar.insert(r.offset + rc);
      }
      ExprPtr cond = terms.front();
      for (size_t i = 1; i < terms.size(); ++i) {
         ExprInfo b;
         b.type = ScalarType::Boolean;
         cond = record(Expr{Binary{BinaryOp::And, cond, terms[i]}}, b);
      }
      on = cond;
   }
   return TableExpr{Join{join.kind, Box<TableExpr>(std::move(left)), Box<TableExpr>(std::move(right)), on, {}}};
}

//---------------------------------------------------------------------------
// Column resolution

std::optional<Analyzer::Resolved> Analyzer::resolveColumn(const ColumnRef& c, const ScopeInfo* scope) {
   unsigned depth = 0;
   for (auto s = scope; s; s = s->parent, ++depth) {
      if (!c.qualifier.empty()) {
         for (size_t i = 0; i < s->items.size(); ++i) {
            auto& item = s->items[i];
            if (!iequals(item.alias, c.qualifier)) continue;
            auto col = item.findColumn(c.name);
            if (!col) throw Error(ErrorCode::UnknownColumn, "column " + c.qualifier + "." + c.name + " not found");
            return Resolved{s, depth, i, *col};
         }
         continue;
      }
      std::vector<std::pair<size_t, size_t>> matches;
      for (size_t i = 0; i < s->items.size(); ++i)
         if (auto col = s->items[i].findColumn(c.name)) matches.emplace_back(i, *col);
      if (matches.empty()) continue;
      if (matches.size() > 1) {
         auto merged = usingSlots_.find(s);
         if (merged != usingSlots_.end()) {
            if (auto slot = merged->second.find(c.name); slot != merged->second.end()) {
               size_t item = s->itemOfSlot(slot->second);
               return Resolved{s, depth, item, slot->second - s->items[item].offset};
            }
         }
         throw Error(ErrorCode::AmbiguousColumn, "column " + c.name + " is ambiguous");
      }
      return Resolved{s, depth, matches[0].first, matches[0].second};
   }
   return std::nullopt;
}

ExprPtr Analyzer::analyzeDimension(const ColumnRef& c, Ctx& ctx) {
   auto& item = ctx.state->scope->items[*ctx.dimItem];
   auto notDimension = [&] {
      return Error(ErrorCode::NonDimensionModifier, (c.qualifier.empty() ? "" : c.qualifier + ".") + c.name + " is not a dimension of the measure");
   };
   if (!c.qualifier.empty() && !iequals(c.qualifier, item.alias)) throw notDimension();
   if (auto col = item.findColumn(c.name)) {
      if (item.columns[*col].isMeasure) throw notDimension();
      ExprInfo info;
      info.type = item.columns[*col].type;
      info.dimension = true;
      return record(Expr{ColumnRef{"", item.columns[*col].name}}, info);
   }
   if (!c.qualifier.empty()) throw notDimension();
   // An alias of the enclosing select whose expression is over the measure's dimensions
   auto& st = *ctx.state;
   for (auto& entry : st.raw->items) {
      auto si = std::get_if<SelectItem>(&entry);
      if (!si || si->isMeasure || !iequals(si->alias, c.name)) continue;
      if (st.dimAliasesInProgress.count(c.name)) throw notDimension();
      st.dimAliasesInProgress.insert(c.name);
      Ctx sub = ctx;
      sub.dimMode = DimMode::Only;
      sub.allowCurrent = false;
      try {
         auto result = analyzeExpr(*si->expr, sub);
         st.dimAliasesInProgress.erase(c.name);
         return result;
      } catch (const Error& e) {
         st.dimAliasesInProgress.erase(c.name);
         if (e.code() == ErrorCode::NonDimensionModifier || e.code() == ErrorCode::UnknownColumn) throw notDimension();
         throw;
      }
   }
   throw notDimension();
}

ExprPtr Analyzer::analyzeColumn(const ColumnRef& c, Ctx& ctx) {
   auto& st = *ctx.state;
   if (ctx.dimMode == DimMode::Only) return analyzeDimension(c, ctx);
   if (ctx.dimMode == DimMode::First && c.qualifier.empty()) {
      auto& item = st.scope->items[*ctx.dimItem];
      if (auto col = item.findColumn(c.name); col && !item.columns[*col].isMeasure) return analyzeDimension(c, ctx);
   }
   if (ctx.clause == Clause::Measure && c.qualifier.empty()) {
      for (auto& entry : st.raw->items)
         if (auto si = std::get_if<SelectItem>(&entry); si && si->isMeasure && iequals(si->alias, c.name)) return analyzeMeasureItem(si->alias, st);
   }
   auto r = resolveColumn(c, st.scope);
   if (!r) throw Error(ErrorCode::UnknownColumn, "column " + (c.qualifier.empty() ? "" : c.qualifier + ".") + c.name + " not found");
   auto& item = r->scope->items[r->item];
   auto& col = item.columns[r->column];
   ExprInfo info;
   info.type = col.type;
   info.column = ColumnBinding{r->depth, r->scope, r->item, r->column, item.offset + r->column};
   if (col.isMeasure) {
      auto misuse = [&](const std::string& why) { return Error(ErrorCode::MeasureMisuse, "measure " + col.name + ": " + why); };
      if (r->depth > 0) throw misuse("measures of an enclosing query cannot be referenced");
      if (ctx.inModifier) throw misuse("measures cannot appear inside context modifiers");
      if (ctx.insideAggregate || ctx.insideWindow) throw misuse("aggregate function applied to a measure");
      switch (ctx.clause) {
         case Clause::GroupBy: throw misuse("measures cannot be grouped by");
         case Clause::On: throw misuse("measures cannot appear in a join condition");
         case Clause::Partition: throw misuse("measures cannot appear in a window");
         case Clause::Measure: throw misuse("a measure formula may only reference sibling measures");
         case Clause::Where:
            if (ctx.atDepth == 0 || !ctx.explicitContext) throw misuse("in WHERE a measure needs AT with ALL or WHERE");
            st.whereHasMeasures = true;
            break;
         default: break;
      }
      info.isMeasure = true;
      if (ctx.clause == Clause::Where)
         info.site = MeasureSite::Where;
      else if (ctx.atDepth > 0)
         info.site = MeasureSite::AtBase;
      else
         info.site = st.scope->grouped ? MeasureSite::GroupedSelect : MeasureSite::UngroupedSelect;
      if (ctx.measureItems) ctx.measureItems->insert(r->item);
   }
   return record(Expr{ColumnRef{item.alias, col.name}}, info);
}

ExprPtr Analyzer::analyzeMeasureItem(const std::string& alias, SelectState& st) {
   if (auto it = st.inlinedMeasures.find(alias); it != st.inlinedMeasures.end()) return it->second;
   if (st.measuresInProgress.count(alias)) throw Error(ErrorCode::MeasureCycle, "measure " + alias + " refers to itself");
   const SelectItem* raw = nullptr;
   for (auto& entry : st.raw->items)
      if (auto si = std::get_if<SelectItem>(&entry); si && si->isMeasure && iequals(si->alias, alias)) raw = si;
   st.measuresInProgress.insert(alias);
   Ctx ctx{&st, Clause::Measure};
   ExprPtr formula = analyzeExpr(*raw->expr, ctx);
   st.measuresInProgress.erase(alias);
   checkMeasureFormula(*formula, *st.scope, *ann_);
   st.inlinedMeasures.emplace(alias, formula);
   return formula;
}

void Analyzer::requireBoolean(const ExprPtr& e, std::string_view where) {
   auto t = typeOf(e);
   if (t && *t != ScalarType::Boolean) throw Error(ErrorCode::TypeMismatch, std::string(where) + " condition must be BOOLEAN, not " + typeName(t));
}


//---------------------------------------------------------------------------
// Expressions

ExprPtr Analyzer::analyzeExpr(const Expr& e, Ctx& ctx) {
   return std::visit(
      [&](const auto& n) -> ExprPtr {
         using T = std::decay_t<decltype(n)>;
         ExprInfo info;
         if constexpr (std::is_same_v<T, ColumnRef>) {
            return analyzeColumn(n, ctx);
         } else if constexpr (std::is_same_v<T, Literal>) {
            if (!n.value.isNull()) info.type = n.value.type();
            return record(Expr{n}, info);
         } else if constexpr (std::is_same_v<T, Unary>) {
            auto operand = analyzeExpr(*n.operand, ctx);
            auto t = typeOf(operand);
            if (n.op == UnaryOp::Not) {
               requireBoolean(operand, "NOT");
               info.type = ScalarType::Boolean;
            } else {
               if (!numeric(t)) throw Error(ErrorCode::TypeMismatch, "cannot negate " + typeName(t));
               info.type = t;
            }
            info.isMeasure = infoOf(operand).isMeasure;
            return record(Expr{Unary{n.op, operand}}, info);
         } else if constexpr (std::is_same_v<T, Binary>) {
            auto left = analyzeExpr(*n.left, ctx);
            auto right = analyzeExpr(*n.right, ctx);
            auto lt = typeOf(left), rt = typeOf(right);
            auto op = std::string(toString(n.op));
            switch (n.op) {
               case BinaryOp::Add:
               case BinaryOp::Sub:
               case BinaryOp::Mul:
               case BinaryOp::Div:
                  if (!numeric(lt) || !numeric(rt)) throw Error(ErrorCode::TypeMismatch, "operator " + op + " needs numbers, got " + typeName(lt) + " and " + typeName(rt));
                  if (n.op == BinaryOp::Div || lt == ScalarType::Double || rt == ScalarType::Double)
                     info.type = ScalarType::Double;
                  else
                     info.type = ScalarType::Integer;
                  break;
               case BinaryOp::And:
               case BinaryOp::Or:
                  requireBoolean(left, op);
                  requireBoolean(right, op);
                  info.type = ScalarType::Boolean;
                  break;
               default:
                  if (!compatible(lt, rt)) throw Error(ErrorCode::TypeMismatch, "cannot compare " + typeName(lt) + " with " + typeName(rt));
                  info.type = ScalarType::Boolean;
                  break;
            }
            return record(Expr{Binary{n.op, left, right}}, info);
         } else if constexpr (std::is_same_v<T, FunctionCall>) {
            return analyzeFunction(n, ctx);
         } else if constexpr (std::is_same_v<T, AggregateCall>) {
            auto name = std::string(toString(n.fn));
            bool allowed = ctx.clause == Clause::Measure ||
               ((ctx.clause == Clause::Select || ctx.clause == Clause::Having || ctx.clause == Clause::OrderBy) && ctx.state->scope->grouped);
            if (!allowed || ctx.inModifier || ctx.dimMode != DimMode::None) throw Error(ErrorCode::Analysis, "aggregate " + name + " is not allowed here");
            if (ctx.insideAggregate || ctx.insideWindow) throw Error(ErrorCode::Analysis, "aggregate " + name + " cannot be nested");
            std::optional<ExprPtr> arg;
            if (n.arg) {
               Ctx sub = ctx;
               sub.insideAggregate = true;
               arg = analyzeExpr(**n.arg, sub);
            }
            if (n.fn == AggregateFn::Count || n.fn == AggregateFn::CountStar) {
               info.type = ScalarType::Integer;
            } else {
               auto t = typeOf(*arg);
               if (!numeric(t)) throw Error(ErrorCode::TypeMismatch, name + " needs a number, got " + typeName(t));
               info.type = n.fn == AggregateFn::Avg ? ScalarType::Double : t.value_or(ScalarType::Integer);
            }
            return record(Expr{AggregateCall{n.fn, arg}}, info);
         } else if constexpr (std::is_same_v<T, WindowCall>) {
            if (ctx.clause != Clause::Select || ctx.state->scope->grouped || ctx.inModifier || ctx.insideAggregate || ctx.insideWindow)
               throw Error(ErrorCode::Analysis, "window aggregates are only allowed in the select list of an ungrouped query");
            Ctx sub = ctx;
            sub.insideWindow = true;
            std::optional<ExprPtr> arg;
            if (n.arg) arg = analyzeExpr(**n.arg, sub);
            sub.clause = Clause::Partition;
            std::vector<ExprPtr> partition;
            for (auto& p : n.partitionBy) partition.push_back(analyzeExpr(*p, sub));
            if (n.fn == AggregateFn::Count || n.fn == AggregateFn::CountStar) {
               info.type = ScalarType::Integer;
            } else {
               auto t = typeOf(*arg);
               if (!numeric(t)) throw Error(ErrorCode::TypeMismatch, "window aggregate needs a number, got " + typeName(t));
               info.type = n.fn == AggregateFn::Avg ? ScalarType::Double : t.value_or(ScalarType::Integer);
            }
            return record(Expr{WindowCall{n.fn, arg, std::move(partition)}}, info);
         } else if constexpr (std::is_same_v<T, AggregateMeasureCall>) {
            if (ctx.clause == Clause::Where || ctx.clause == Clause::On || ctx.clause == Clause::GroupBy || ctx.clause == Clause::Partition)
               throw Error(ErrorCode::MeasureMisuse, "AGGREGATE is not allowed here");
            if (ctx.inModifier || ctx.insideAggregate || ctx.insideWindow || ctx.dimMode != DimMode::None || ctx.clause == Clause::Measure)
               throw Error(ErrorCode::MeasureMisuse, "AGGREGATE is not allowed here");
            if (ctx.state->whereHasMeasures) throw Error(ErrorCode::MeasureMisuse, "AGGREGATE cannot be used when WHERE references measures");
            std::set<size_t> items;
            Ctx sub = ctx;
            sub.atDepth++;
            sub.measureItems = &items;
            auto operand = analyzeExpr(*n.operand, sub);
            if (!infoOf(operand).isMeasure) throw Error(ErrorCode::MeasureMisuse, "AGGREGATE requires a measure operand");
            if (items.size() > 1) throw Error(ErrorCode::MeasureMisuse, "AGGREGATE operand mixes measures of different tables");
            if (ctx.measureItems) ctx.measureItems->insert(items.begin(), items.end());
            info.type = typeOf(operand);
            return record(Expr{AggregateMeasureCall{operand}}, info);
         } else if constexpr (std::is_same_v<T, AtExpr>) {
            return analyzeAt(n, ctx);
         } else if constexpr (std::is_same_v<T, CurrentRef>) {
            if (!ctx.allowCurrent) throw Error(ErrorCode::InvalidCurrent, "CURRENT is only allowed in a SET value");
            auto col = n.dimension->template as<ColumnRef>();
            Ctx sub = ctx;
            sub.dimMode = DimMode::Only;
            sub.allowCurrent = false;
            ExprPtr dim = col ? analyzeDimension(*col, sub) : analyzeExpr(*n.dimension, sub);
            info.type = typeOf(dim);
            return record(Expr{CurrentRef{dim}}, info);
         } else if constexpr (std::is_same_v<T, ScalarSubquery> || std::is_same_v<T, Exists>) {
            if (ctx.dimMode == DimMode::Only) throw Error(ErrorCode::NonDimensionModifier, "a dimension cannot contain a subquery");
            auto body = analyzeQuery(*n.query, ctx.state->scope, ctx.state->ctes);
            if constexpr (std::is_same_v<T, ScalarSubquery>) {
               if (body.columns.size() != 1) throw Error(ErrorCode::Analysis, "scalar subquery must return one column");
               info.type = body.columns[0].type;
            } else {
               info.type = ScalarType::Boolean;
            }
            return record(Expr{T{body.query}}, info);
         }
      },
      e.node);
}

ExprPtr Analyzer::analyzeFunction(const FunctionCall& f, Ctx& ctx) {
   ExprInfo info;
   std::vector<ExprPtr> args;
   if (iequals(f.name, "YEAR")) {
      if (f.args.size() != 1) throw Error(ErrorCode::Analysis, "YEAR takes one argument");
      args.push_back(analyzeExpr(*f.args[0], ctx));
      auto t = typeOf(args[0]);
      if (t && *t != ScalarType::Date) throw Error(ErrorCode::TypeMismatch, "YEAR needs a DATE, got " + typeName(t));
      info.type = ScalarType::Integer;
      return record(Expr{FunctionCall{"YEAR", std::move(args)}}, info);
   }
   if (iequals(f.name, "GROUPING")) {
      if (f.args.size() != 1) throw Error(ErrorCode::Analysis, "GROUPING takes one argument");
      if (ctx.dimMode != DimMode::None || ctx.inModifier) throw Error(ErrorCode::Analysis, "GROUPING is not allowed here");
      Ctx sub = ctx;
      sub.insideAggregate = false;
      args.push_back(analyzeExpr(*f.args[0], sub));
      info.type = ScalarType::Integer;
      auto node = record(Expr{FunctionCall{"GROUPING", std::move(args)}}, info);
      // before grouping only an enclosing query's keys are visible
      bool preGrouping = ctx.clause == Clause::Where || ctx.clause == Clause::GroupBy || ctx.clause == Clause::On || ctx.insideAggregate;
      groupingCalls_.push_back(GroupingCall{node, ctx.state->scope, preGrouping});
      return node;
   }
   throw Error(ErrorCode::Analysis, "unknown function " + f.name);
}

ExprPtr Analyzer::analyzeAt(const AtExpr& at, Ctx& ctx) {
   if (ctx.inModifier || ctx.dimMode != DimMode::None) throw Error(ErrorCode::MeasureMisuse, "AT cannot appear inside context modifiers");
   if (ctx.insideAggregate || ctx.insideWindow) throw Error(ErrorCode::MeasureMisuse, "aggregate function applied to a measure");
   bool explicitHere = false;
   for (auto& m : at.modifiers)
      if (std::holds_alternative<AllBare>(m) || std::holds_alternative<WherePred>(m)) explicitHere = true;

   std::set<size_t> items;
   Ctx baseCtx = ctx;
   baseCtx.atDepth++;
   baseCtx.explicitContext = ctx.explicitContext || explicitHere;
   baseCtx.measureItems = &items;
   auto base = analyzeExpr(*at.base, baseCtx);
   if (items.empty() || !infoOf(base).isMeasure) throw Error(ErrorCode::MeasureMisuse, "AT must be applied to a measure");
   if (items.size() > 1) throw Error(ErrorCode::MeasureMisuse, "AT operand mixes measures of different tables");
   if (ctx.measureItems) ctx.measureItems->insert(items.begin(), items.end());

   Ctx modCtx = ctx;
   modCtx.inModifier = true;
   modCtx.dimItem = *items.begin();
   modCtx.measureItems = nullptr;
   auto dimensionOf = [&](const ExprPtr& raw) {
      Ctx d = modCtx;
      d.dimMode = DimMode::Only;
      return analyzeExpr(*raw, d);
   };

   std::vector<ContextModifier> modifiers;
   for (auto& m : at.modifiers) {
      if (std::holds_alternative<AllBare>(m)) {
         modifiers.push_back(AllBare{});
      } else if (auto all = std::get_if<AllDims>(&m)) {
         AllDims out;
         for (auto& d : all->dimensions) out.dimensions.push_back(dimensionOf(d));
         modifiers.push_back(std::move(out));
      } else if (auto set = std::get_if<SetDim>(&m)) {
         auto dim = dimensionOf(set->dimension);
         Ctx v = modCtx;
         v.allowCurrent = true;
         auto value = analyzeExpr(*set->value, v);
         if (!compatible(typeOf(dim), typeOf(value))) throw Error(ErrorCode::TypeMismatch, "SET assigns " + typeName(typeOf(value)) + " to a " + typeName(typeOf(dim)) + " dimension");
         modifiers.push_back(SetDim{dim, value});
      } else if (std::holds_alternative<Visible>(m)) {
         if (ctx.clause == Clause::Where) throw Error(ErrorCode::MeasureMisuse, "VISIBLE is not allowed in WHERE");
         if (ctx.state->whereHasMeasures) throw Error(ErrorCode::MeasureMisuse, "VISIBLE cannot be used when WHERE references measures");
         modifiers.push_back(Visible{});
      } else {
         Ctx p = modCtx;
         p.dimMode = DimMode::First;
         auto pred = analyzeExpr(*std::get<WherePred>(m).predicate, p);
         requireBoolean(pred, "AT WHERE");
         modifiers.push_back(WherePred{pred});
      }
   }
   ExprInfo info;
   info.type = typeOf(base);
   info.isMeasure = true;
   return record(Expr{AtExpr{base, std::move(modifiers)}}, info);
}

//---------------------------------------------------------------------------
// Queries

QueryResult Analyzer::analyzeQuery(const Query& q, const ScopeInfo* parent, const CteEnv* ctes) {
   std::vector<std::unique_ptr<CteEnv>> envs;
   for (auto& cte : q.with) {
      for (auto& other : envs)
         if (iequals(other->name, cte.name)) throw Error(ErrorCode::DuplicateName, "WITH name " + cte.name + " is used twice");
      envs.push_back(std::make_unique<CteEnv>(CteEnv{ctes, cte.name, cte.query}));
      ctes = envs.back().get();
   }

   auto scopeOwner = std::make_unique<ScopeInfo>();
   ScopeInfo* scope = scopeOwner.get();
   scope->parent = parent;
   const Select& raw = q.select;
   SelectState st{scope, &raw, ctes};

   Select out;
   std::set<size_t> hiddenForStar;
   for (auto& t : raw.from) out.from.push_back(analyzeTable(t, st, hiddenForStar));

   bool hasMeasureItems = false;
   bool aggregates = false;
   auto scan = [&](const Expr& e) {
      if (containsOwnAggregate(e)) aggregates = true;
   };
   bool plainAggregate = false;
   for (auto& entry : raw.items)
      if (auto si = std::get_if<SelectItem>(&entry)) {
         if (si->isMeasure) {
            hasMeasureItems = true;
            continue;
         }
         scan(*si->expr);
         if (containsAggregateCall(*si->expr)) plainAggregate = true;
      }
   if (raw.having) {
      scan(**raw.having);
      if (containsAggregateCall(**raw.having)) plainAggregate = true;
   }
   for (auto& o : q.orderBy) {
      scan(*o.expr);
      if (containsAggregateCall(*o.expr)) plainAggregate = true;
   }
   scope->grouped = raw.groupBy.has_value() || aggregates;
   scope->groupedByAggregateSugar = !raw.groupBy && aggregates && !plainAggregate;
   if (hasMeasureItems && scope->grouped) throw Error(ErrorCode::Analysis, "AS MEASURE cannot be used in a grouped query");
   if (raw.having && !scope->grouped) throw Error(ErrorCode::Analysis, "HAVING requires a grouped query");

   if (raw.where) {
      Ctx ctx{&st, Clause::Where};
      out.where = analyzeExpr(**raw.where, ctx);
      requireBoolean(*out.where, "WHERE");
   }
   if (raw.groupBy) {
      GroupBy g{raw.groupBy->rollup, {}};
      for (auto& k : raw.groupBy->keys) {
         Ctx ctx{&st, Clause::GroupBy};
         g.keys.push_back(analyzeExpr(*k, ctx));
      }
      scope->rollup = g.rollup;
      scope->keys = g.keys;
      out.groupBy = std::move(g);
   }

   for (auto& entry : raw.items) {
      if (auto star = std::get_if<StarItem>(&entry)) {
         bool matched = false;
         for (size_t i = 0; i < scope->items.size(); ++i) {
            auto& item = scope->items[i];
            if (!star->qualifier.empty() && !iequals(star->qualifier, item.alias)) continue;
            matched = true;
            for (size_t c = 0; c < item.columns.size(); ++c) {
               if (item.columns[c].isMeasure) continue;
               if (star->qualifier.empty() && hiddenForStar.count(item.offset + c)) continue;
               ExprInfo info;
               info.type = item.columns[c].type;
               info.column = ColumnBinding{0, scope, i, c, item.offset + c};
               auto ref = record(Expr{ColumnRef{item.alias, item.columns[c].name}}, info);
               out.items.push_back(SelectItem{ref, item.columns[c].name, false});
               scope->output.push_back(ColumnInfo{item.columns[c].name, item.columns[c].type, false});
            }
         }
         if (!matched) throw Error(ErrorCode::UnknownTable, "table alias " + star->qualifier + " not found");
         continue;
      }
      auto& si = std::get<SelectItem>(entry);
      if (si.isMeasure) {
         auto formula = analyzeMeasureItem(si.alias, st);
         out.items.push_back(SelectItem{formula, si.alias, true});
         scope->output.push_back(ColumnInfo{si.alias, typeOf(formula), true});
         continue;
      }
      Ctx ctx{&st, Clause::Select};
      auto expr = analyzeExpr(*si.expr, ctx);
      std::string name = si.alias.empty() ? defaultOutputName(*expr, scope->output.size()) : si.alias;
      out.items.push_back(SelectItem{expr, name, false});
      scope->output.push_back(ColumnInfo{name, typeOf(expr), false});
   }

   if (raw.having) {
      Ctx ctx{&st, Clause::Having};
      out.having = analyzeExpr(**raw.having, ctx);
      requireBoolean(*out.having, "HAVING");
   }

   std::vector<OrderItem> orderBy;
   std::vector<std::optional<size_t>> orderOutput;
   for (auto& o : q.orderBy) {
      auto c = o.expr->as<ColumnRef>();
      std::optional<size_t> target;
      if (c && c->qualifier.empty())
         for (size_t i = 0; i < scope->output.size() && !target; ++i)
            if (iequals(scope->output[i].name, c->name) && !scope->output[i].isMeasure) target = i;
      if (target) {
         ExprInfo info;
         info.type = scope->output[*target].type;
         orderBy.push_back(OrderItem{record(Expr{ColumnRef{"", scope->output[*target].name}}, info), o.descending});
      } else {
         Ctx ctx{&st, Clause::OrderBy};
         orderBy.push_back(OrderItem{analyzeExpr(*o.expr, ctx), o.descending});
      }
      orderOutput.push_back(target);
   }

   if (scope->grouped) {
      for (auto& entry : out.items)
         if (auto& si = std::get<SelectItem>(entry); !si.isMeasure) markGroupKeys(si.expr, scope, *scope);
      if (out.having) markGroupKeys(*out.having, scope, *scope);
      for (size_t i = 0; i < orderBy.size(); ++i)
         if (!orderOutput[i]) markGroupKeys(orderBy[i].expr, scope, *scope);
   }

   QueryPtr result(Query{{}, std::move(out), std::move(orderBy)});
   for (size_t i = 0; i < orderOutput.size(); ++i)
      if (orderOutput[i]) ann_->orderOutput[&result->orderBy[i]] = *orderOutput[i];
   auto columns = scope->output;
   ann_->scopes[&result->select] = std::move(scopeOwner);
   return {result, columns};
}

//---------------------------------------------------------------------------
// Group keys

bool Analyzer::keyMatches(const Expr& a, const Expr& b) {
   if (a.node.index() != b.node.index()) return false;
   if (auto ca = a.as<ColumnRef>()) {
      auto& ia = ann_->exprs.at(&a);
      auto& ib = ann_->exprs.at(&b);
      if (ia.column && ib.column) return ia.column->scope == ib.column->scope && ia.column->slot == ib.column->slot;
      return ia.dimension && ib.dimension && iequals(ca->name, b.as<ColumnRef>()->name);
   }
   if (auto la = a.as<Literal>()) return la->value == b.as<Literal>()->value;
   if (auto ua = a.as<Unary>()) {
      auto ub = b.as<Unary>();
      return ua->op == ub->op && keyMatches(*ua->operand, *ub->operand);
   }
   if (auto ba = a.as<Binary>()) {
      auto bb = b.as<Binary>();
      return ba->op == bb->op && keyMatches(*ba->left, *bb->left) && keyMatches(*ba->right, *bb->right);
   }
   if (auto fa = a.as<FunctionCall>()) {
      auto fb = b.as<FunctionCall>();
      if (!iequals(fa->name, fb->name) || fa->args.size() != fb->args.size()) return false;
      for (size_t i = 0; i < fa->args.size(); ++i)
         if (!keyMatches(*fa->args[i], *fb->args[i])) return false;
      return true;
   }
   return false;
}

void Analyzer::markGroupKeys(const ExprPtr& e, const ScopeInfo* current, const ScopeInfo& grouped) {
   auto& info = ann_->exprs.at(e.get());
   if (!info.dimension && !e->is<Literal>()) {
      for (size_t k = 0; k < grouped.keys.size(); ++k)
         if (keyMatches(*e, *grouped.keys[k])) {
            info.groupKey = GroupKeyRef{hops(current, &grouped), k};
            return;
         }
   }
   std::visit(
      [&](const auto& n) {
         using T = std::decay_t<decltype(n)>;
         if constexpr (std::is_same_v<T, ColumnRef>) {
            if (info.column && info.column->scope == &grouped && !info.isMeasure)
               throw Error(ErrorCode::Analysis, "column " + n.qualifier + "." + n.name + " must appear in GROUP BY or inside an aggregate");
         } else if constexpr (std::is_same_v<T, Unary>) {
            markGroupKeys(n.operand, current, grouped);
         } else if constexpr (std::is_same_v<T, Binary>) {
            markGroupKeys(n.left, current, grouped);
            markGroupKeys(n.right, current, grouped);
         } else if constexpr (std::is_same_v<T, FunctionCall>) {
            if (iequals(n.name, "GROUPING")) return;
            for (auto& a : n.args) markGroupKeys(a, current, grouped);
         } else if constexpr (std::is_same_v<T, AggregateCall> || std::is_same_v<T, WindowCall>) {
            if (current == &grouped) return;
            if (n.arg) markGroupKeys(*n.arg, current, grouped);
            if constexpr (std::is_same_v<T, WindowCall>)
               for (auto& p : n.partitionBy) markGroupKeys(p, current, grouped);
         } else if constexpr (std::is_same_v<T, AggregateMeasureCall>) {
            markGroupKeys(n.operand, current, grouped);
         } else if constexpr (std::is_same_v<T, AtExpr>) {
            markGroupKeys(n.base, current, grouped);
            for (auto& m : n.modifiers) {
               if (auto all = std::get_if<AllDims>(&m))
                  for (auto& d : all->dimensions) markGroupKeys(d, current, grouped);
               else if (auto set = std::get_if<SetDim>(&m)) {
                  markGroupKeys(set->dimension, current, grouped);
                  markGroupKeys(set->value, current, grouped);
               } else if (auto where = std::get_if<WherePred>(&m))
                  markGroupKeys(where->predicate, current, grouped);
            }
         } else if constexpr (std::is_same_v<T, CurrentRef>) {
         } else if constexpr (std::is_same_v<T, ScalarSubquery> || std::is_same_v<T, Exists>) {
            markQuery(*n.query, grouped);
         }
      },
      e->node);
}

void Analyzer::markTable(const TableExpr& t, const ScopeInfo* current, const ScopeInfo& grouped) {
   if (auto s = t.as<SubqueryRef>()) {
      markQuery(*s->query, grouped);
   } else if (auto j = t.as<Join>()) {
      markTable(*j->left, current, grouped);
      markTable(*j->right, current, grouped);
      if (j->on) markGroupKeys(*j->on, current, grouped);
   }
}

void Analyzer::markQuery(const Query& q, const ScopeInfo& grouped) {
   const ScopeInfo* scope = ann_->scopes.at(&q.select).get();
   auto& s = q.select;
   for (auto& t : s.from) markTable(t, scope, grouped);
   for (auto& entry : s.items)
      if (auto& si = std::get<SelectItem>(entry); !si.isMeasure) markGroupKeys(si.expr, scope, grouped);
   if (s.where) markGroupKeys(*s.where, scope, grouped);
   if (s.groupBy)
      for (auto& k : s.groupBy->keys) markGroupKeys(k, scope, grouped);
   if (s.having) markGroupKeys(*s.having, scope, grouped);
   for (auto& o : q.orderBy)
      if (!ann_->orderOutput.count(&o)) markGroupKeys(o.expr, scope, grouped);
}

void Analyzer::validateGroupingCalls() {
   for (auto& [node, scope, preGrouping] : groupingCalls_) {
      auto& arg = *node->as<FunctionCall>()->args[0];
      bool found = false;
      unsigned depth = preGrouping ? 1 : 0;
      for (auto s = preGrouping ? scope->parent : scope; s && !found; s = s->parent, ++depth) {
         if (!s->grouped) continue;
         for (size_t k = 0; k < s->keys.size(); ++k)
            if (keyMatches(arg, *s->keys[k])) {
               ann_->exprs.at(node.get()).groupingOf = GroupKeyRef{depth, k};
               found = true;
               break;
            }
      }
      if (!found) throw Error(ErrorCode::Analysis, "GROUPING argument must be a group key");
   }
}

void checkFormula(const Expr& e, const ScopeInfo& scope, const Annotations& ann) {
   if (auto c = e.as<ColumnRef>()) {
      auto it = ann.exprs.find(&e);
      if (it != ann.exprs.end() && it->second.column && it->second.column->scope == &scope && !it->second.isMeasure)
         throw Error(ErrorCode::NonAggregatableMeasure, "measure formula uses column " + c->name + " outside an aggregate");
   } else if (auto u = e.as<Unary>()) {
      checkFormula(*u->operand, scope, ann);
   } else if (auto b = e.as<Binary>()) {
      checkFormula(*b->left, scope, ann);
      checkFormula(*b->right, scope, ann);
   } else if (auto f = e.as<FunctionCall>()) {
      for (auto& a : f->args) checkFormula(*a, scope, ann);
   } else if (e.is<WindowCall>() || e.is<AtExpr>() || e.is<AggregateMeasureCall>()) {
      throw Error(ErrorCode::NonAggregatableMeasure, "measure formulas may only combine aggregates, literals and sibling measures");
   }
}

}

void checkMeasureFormula(const Expr& formula, const ScopeInfo& scope, const Annotations& annotations) {
   checkFormula(formula, scope, annotations);
}

ResolvedQuery analyze(const Query& query, const Catalog& catalog) {
   Analyzer analyzer(catalog);
   auto result = analyzer.analyzeQuery(query, nullptr, nullptr);
   analyzer.validateGroupingCalls();
   return ResolvedQuery{result.query, result.columns, analyzer.annotations()};
}

}
