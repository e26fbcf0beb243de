#include "measql/engine.hpp"

#include "measql/error.hpp"

#include <algorithm>
#include <cmath>

namespace measql {

using namespace ast;

void Database::add(const std::string& table, Relation relation) {
   tables_[table] = std::move(relation);
}

const Relation& Database::table(std::string_view name) const {
   if (auto r = find(name)) return *r;
   throw Error(ErrorCode::MissingData, "no data loaded for table " + std::string(name));
}

const Relation* Database::find(std::string_view name) const {
   auto it = tables_.find(name);
   return it == tables_.end() ? nullptr : &it->second;
}

Relation* Database::findMutable(std::string_view name) {
   auto it = tables_.find(name);
   return it == tables_.end() ? nullptr : &it->second;
}

Value aggregate(AggregateFn fn, const std::vector<Value>& inputs) {
   if (fn == AggregateFn::CountStar) return Value(static_cast<int64_t>(inputs.size()));
   int64_t count = 0;
   bool allIntegers = true;
   int64_t isum = 0;
   double dsum = 0;
   for (auto& v : inputs) {
      if (v.isNull()) continue;
      ++count;
      if (fn == AggregateFn::Count) continue;
      if (!v.isNumber()) throw Error(ErrorCode::TypeError, "cannot aggregate a non-numeric value");
      if (v.isInteger()) isum += v.asInteger();
      else allIntegers = false;
      dsum += v.toDouble();
   }
   switch (fn) {
      case AggregateFn::Count: return Value(count);
      case AggregateFn::Sum:
         if (count == 0) return Value();
         return allIntegers ? Value(isum) : Value(dsum);
      case AggregateFn::Avg:
         if (count == 0) return Value();
         return Value(dsum / static_cast<double>(count));
      default: return Value();
   }
}

namespace {

struct Group {
   std::vector<Value> keys;
   std::vector<bool> rolledUp;
   std::vector<size_t> rows;
};

struct Frame {
   const ScopeInfo* scope;
   const Frame* parent;
   const Row* row = nullptr;
   const Group* group = nullptr;
   const std::vector<Row>* rows = nullptr;
   size_t rowIndex = 0;
   const std::unordered_map<const Expr*, std::vector<Value>>* windows = nullptr;

   const Frame& up(unsigned depth) const {
      const Frame* f = this;
      for (unsigned i = 0; i < depth; ++i) {
         if (!f->parent) throw Error(ErrorCode::TypeError, "correlated reference has no enclosing row");
         f = f->parent;
      }
      return *f;
   }
};

struct KeyLess {
   bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
      for (size_t i = 0; i < a.size(); ++i) {
         if (sortsBefore(a[i], b[i])) return true;
         if (sortsBefore(b[i], a[i])) return false;
      }
      return false;
   }
};

std::optional<bool> asTruth(const Value& v) {
   if (v.isNull()) return std::nullopt;
   if (!v.isBool()) throw Error(ErrorCode::TypeError, "expected a BOOLEAN value");
   return v.asBool();
}

class Executor {
   public:
   Executor(const ResolvedQuery& q, const Database& db) : q_(q), db_(db) {}

   Relation run(const Query& query, const Frame* parent);

   private:
   Value eval(const ExprPtr& e, const Frame& f);
   bool test(const ExprPtr& e, const Frame& f) { return asTruth(eval(e, f)).value_or(false); }
   std::vector<Row> produce(const TableExpr& t, const ScopeInfo& scope, const Frame* parent);
   void itemRange(const TableExpr& t, const ScopeInfo& scope, std::vector<std::pair<size_t, size_t>>& out);
   size_t itemIndex(const ScopeInfo& scope, const std::string& alias);
   void fill(Row& target, const Row& source, const std::vector<std::pair<size_t, size_t>>& ranges);
   Value arithmetic(BinaryOp op, const Value& l, const Value& r);

   const ResolvedQuery& q_;
   const Database& db_;
};

size_t Executor::itemIndex(const ScopeInfo& scope, const std::string& alias) {
   for (size_t i = 0; i < scope.items.size(); ++i)
      if (scope.items[i].alias == alias) return i;
   throw Error(ErrorCode::TypeError, "unknown FROM item " + alias);
}

void Executor::itemRange(const TableExpr& t, const ScopeInfo& scope, std::vector<std::pair<size_t, size_t>>& out) {
   if (auto ref = t.as<TableRef>()) {
      auto& item = scope.items[itemIndex(scope, ref->alias)];
      out.emplace_back(item.offset, item.offset + item.columns.size());
   } else if (auto sub = t.as<SubqueryRef>()) {
      auto& item = scope.items[itemIndex(scope, sub->alias)];
      out.emplace_back(item.offset, item.offset + item.columns.size());
   } else {
      auto& j = *t.as<Join>();
      itemRange(*j.left, scope, out);
      itemRange(*j.right, scope, out);
   }
}

void Executor::fill(Row& target, const Row& source, const std::vector<std::pair<size_t, size_t>>& ranges) {
   for (auto [b, e] : ranges)
      for (size_t i = b; i < e; ++i) target[i] = source[i];
}

std::vector<Row> Executor::produce(const TableExpr& t, const ScopeInfo& scope, const Frame* parent) {
   std::vector<Row> out;
   if (t.as<TableRef>() || t.as<SubqueryRef>()) {
      const FromItem* item;
      Relation derived;
      const Relation* rel;
      if (auto ref = t.as<TableRef>()) {
         item = &scope.items[itemIndex(scope, ref->alias)];
         rel = &db_.table(ref->name);
      } else {
         auto sub = t.as<SubqueryRef>();
         item = &scope.items[itemIndex(scope, sub->alias)];
         derived = run(*sub->query, parent);
         rel = &derived;
      }
      for (auto& r : rel->rows) {
         if (r.size() != item->columns.size()) throw Error(ErrorCode::TypeError, "row width of " + item->alias + " does not match its schema");
         Row row(scope.width);
         std::copy(r.begin(), r.end(), row.begin() + static_cast<std::ptrdiff_t>(item->offset));
         out.push_back(std::move(row));
      }
      return out;
   }
   auto& j = *t.as<Join>();
   auto left = produce(*j.left, scope, parent);
   auto right = produce(*j.right, scope, parent);
   std::vector<std::pair<size_t, size_t>> rightRanges;
   itemRange(*j.right, scope, rightRanges);
   for (auto& l : left) {
      bool matched = false;
      for (auto& r : right) {
         Row merged = l;
         fill(merged, r, rightRanges);
         Frame f{&scope, parent, &merged};
         if (!j.on || test(*j.on, f)) {
            matched = true;
            out.push_back(std::move(merged));
         }
      }
      if (!matched && j.kind == JoinKind::Left) out.push_back(l);
   }
   return out;
}

Relation Executor::run(const Query& query, const Frame* parent) {
   const ScopeInfo& scope = q_.scope(query.select);
   const Select& select = query.select;

   std::vector<Row> rows{Row(scope.width)};
   for (auto& t : select.from) {
      auto part = produce(t, scope, parent);
      std::vector<std::pair<size_t, size_t>> ranges;
      itemRange(t, scope, ranges);
      std::vector<Row> next;
      for (auto& r : rows)
         for (auto& p : part) {
            Row merged = r;
            fill(merged, p, ranges);
            next.push_back(std::move(merged));
         }
      rows = std::move(next);
   }
   if (select.where) {
      std::vector<Row> kept;
      for (auto& r : rows) {
         Frame f{&scope, parent, &r};
         if (test(*select.where, f)) kept.push_back(std::move(r));
      }
      rows = std::move(kept);
   }

   Relation result;
   std::vector<const SelectItem*> items;
   for (auto& entry : select.items) {
      auto& si = std::get<SelectItem>(entry);
      if (si.isMeasure) continue;
      items.push_back(&si);
      result.columnNames.push_back(si.alias);
   }
   std::vector<std::vector<Value>> orderKeys;
   auto emit = [&](const Frame& f) {
      Row out;
      for (auto si : items) out.push_back(eval(si->expr, f));
      if (!query.orderBy.empty()) {
         std::vector<Value> keys;
         for (auto& o : query.orderBy) {
            auto it = q_.annotations->orderOutput.find(&o);
            keys.push_back(it != q_.annotations->orderOutput.end() ? out[it->second] : eval(o.expr, f));
         }
         orderKeys.push_back(std::move(keys));
      }
      result.rows.push_back(std::move(out));
   };

   if (!scope.grouped) {
      std::unordered_map<const Expr*, std::vector<Value>> windows;
      for (auto si : items) {
         rewrite(si->expr, [&](const ExprPtr& x) -> std::optional<ExprPtr> {
            auto w = x->as<WindowCall>();
            if (!w) return x->is<ScalarSubquery>() || x->is<Exists>() ? std::optional<ExprPtr>(x) : std::nullopt;
            std::map<std::vector<Value>, std::vector<size_t>, KeyLess> partitions;
            for (size_t i = 0; i < rows.size(); ++i) {
               Frame f{&scope, parent, &rows[i]};
               std::vector<Value> key;
               for (auto& p : w->partitionBy) key.push_back(eval(p, f));
               partitions[key].push_back(i);
            }
            auto& values = windows[x.get()];
            values.resize(rows.size());
            for (auto& [key, members] : partitions) {
               std::vector<Value> inputs;
               for (auto i : members) {
                  Frame f{&scope, parent, &rows[i]};
                  inputs.push_back(w->arg ? eval(*w->arg, f) : Value(true));
               }
               Value v = aggregate(w->fn, inputs);
               for (auto i : members) values[i] = v;
            }
            return x;
         });
      }
      for (size_t i = 0; i < rows.size(); ++i) {
         Frame f{&scope, parent, &rows[i], nullptr, &rows, i, &windows};
         emit(f);
      }
   } else {
      size_t n = scope.keys.size();
      std::vector<std::vector<Value>> keyValues;
      for (auto& r : rows) {
         Frame f{&scope, parent, &r};
         std::vector<Value> k;
         for (auto& key : scope.keys) k.push_back(eval(key, f));
         keyValues.push_back(std::move(k));
      }
      std::vector<Group> groups;
      size_t lowest = scope.rollup ? 0 : n;
      for (size_t level = n + 1; level-- > lowest;) {
         std::map<std::vector<Value>, std::vector<size_t>, KeyLess> byKey;
         for (size_t i = 0; i < rows.size(); ++i) {
            std::vector<Value> k(keyValues[i].begin(), keyValues[i].begin() + static_cast<std::ptrdiff_t>(level));
            byKey[k].push_back(i);
         }
         if (level == 0 && byKey.empty()) byKey[{}];
         for (auto& [k, members] : byKey) {
            Group g;
            g.keys = k;
            g.keys.resize(n);
            g.rolledUp.assign(n, false);
            for (size_t i = level; i < n; ++i) g.rolledUp[i] = true;
            g.rows = members;
            groups.push_back(std::move(g));
         }
      }
      for (auto& g : groups) {
         Frame f{&scope, parent, nullptr, &g, &rows};
         if (select.having && !test(*select.having, f)) continue;
         emit(f);
      }
   }

   if (!query.orderBy.empty()) {
      std::vector<size_t> order(result.rows.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
         for (size_t k = 0; k < query.orderBy.size(); ++k) {
            auto& x = orderKeys[a][k];
            auto& y = orderKeys[b][k];
            if (x.isNull() != y.isNull()) return y.isNull();
            bool desc = query.orderBy[k].descending;
            if (sortsBefore(x, y)) return !desc;
            if (sortsBefore(y, x)) return desc;
         }
         return false;
      });
      std::vector<Row> sorted;
      for (auto i : order) sorted.push_back(std::move(result.rows[i]));
      result.rows = std::move(sorted);
   }
   return result;
}

Value Executor::arithmetic(BinaryOp op, const Value& l, const Value& r) {
   if (l.isNull() || r.isNull()) return Value();
   if (!l.isNumber() || !r.isNumber()) throw Error(ErrorCode::TypeError, "arithmetic on non-numeric values");
   if (op == BinaryOp::Div) {
      if (r.toDouble() == 0) throw Error(ErrorCode::DivisionByZero, "division by zero");
      return Value(l.toDouble() / r.toDouble());
   }
   if (l.isInteger() && r.isInteger()) {
      int64_t a = l.asInteger(), b = r.asInteger();
      switch (op) {
         case BinaryOp::Add: return Value(a + b);
         case BinaryOp::Sub: return Value(a - b);
         default: return Value(a * b);
      }
   }
   double a = l.toDouble(), b = r.toDouble();
   switch (op) {
      case BinaryOp::Add: return Value(a + b);
      case BinaryOp::Sub: return Value(a - b);
      default: return Value(a * b);
   }
}

Value Executor::eval(const ExprPtr& e, const Frame& f) {
   auto info = q_.find(*e);
   if (info && info->groupKey) {
      auto& target = f.up(info->groupKey->depth);
      if (!target.group) throw Error(ErrorCode::TypeError, "group key used outside its group");
      return target.group->keys[info->groupKey->index];
   }
   return std::visit(
      [&](const auto& n) -> Value {
         using T = std::decay_t<decltype(n)>;
         if constexpr (std::is_same_v<T, ColumnRef>) {
            if (!info || !info->column) throw Error(ErrorCode::TypeError, "unresolved column " + n.name);
            auto& target = f.up(info->column->depth);
            if (!target.row) throw Error(ErrorCode::TypeError, "column " + n.name + " is not available after grouping");
            return (*target.row)[info->column->slot];
         } else if constexpr (std::is_same_v<T, Literal>) {
            return n.value;
         } else if constexpr (std::is_same_v<T, Unary>) {
            Value v = eval(n.operand, f);
            if (n.op == UnaryOp::Not) {
               auto t = asTruth(v);
               return t ? Value(!*t) : Value();
            }
            if (v.isNull()) return v;
            if (v.isInteger()) return Value(-v.asInteger());
            if (v.isDouble()) return Value(-v.asDouble());
            throw Error(ErrorCode::TypeError, "cannot negate a non-numeric value");
         } else if constexpr (std::is_same_v<T, Binary>) {
            if (n.op == BinaryOp::And) {
               auto l = asTruth(eval(n.left, f));
               if (l == false) return Value(false);
               auto r = asTruth(eval(n.right, f));
               if (r == false) return Value(false);
               return l && r ? Value(true) : Value();
            }
            if (n.op == BinaryOp::Or) {
               auto l = asTruth(eval(n.left, f));
               if (l == true) return Value(true);
               auto r = asTruth(eval(n.right, f));
               if (r == true) return Value(true);
               return l && r ? Value(false) : Value();
            }
            Value l = eval(n.left, f);
            Value r = eval(n.right, f);
            switch (n.op) {
               case BinaryOp::Add:
               case BinaryOp::Sub:
               case BinaryOp::Mul:
               case BinaryOp::Div: return arithmetic(n.op, l, r);
               case BinaryOp::IsNotDistinctFrom: return Value(notDistinct(l, r));
               default: break;
            }
            if (l.isNull() || r.isNull()) return Value();
            auto c = compareValues(l, r);
            if (!c) throw Error(ErrorCode::TypeError, "cannot compare " + l.toString() + " with " + r.toString());
            switch (n.op) {
               case BinaryOp::Eq: return Value(*c == 0);
               case BinaryOp::Ne: return Value(*c != 0);
               case BinaryOp::Lt: return Value(*c < 0);
               case BinaryOp::Le: return Value(*c <= 0);
               case BinaryOp::Gt: return Value(*c > 0);
               default: return Value(*c >= 0);
            }
         } else if constexpr (std::is_same_v<T, FunctionCall>) {
            if (iequals(n.name, "GROUPING")) {
               if (!info || !info->groupingOf) throw Error(ErrorCode::TypeError, "GROUPING is not bound to a group key");
               auto& target = f.up(info->groupingOf->depth);
               if (!target.group) throw Error(ErrorCode::TypeError, "GROUPING used outside its group");
               return Value(target.group->rolledUp[info->groupingOf->index] ? 1 : 0);
            }
            Value v = eval(n.args[0], f);
            if (v.isNull()) return v;
            if (!v.isDate()) throw Error(ErrorCode::TypeError, "YEAR needs a DATE");
            return Value(static_cast<int64_t>(v.asDate().year()));
         } else if constexpr (std::is_same_v<T, AggregateCall>) {
            if (!f.group) throw Error(ErrorCode::TypeError, "aggregate evaluated outside a group");
            std::vector<Value> inputs;
            for (auto i : f.group->rows) {
               if (!n.arg) {
                  inputs.emplace_back(true);
                  continue;
               }
               Frame rowFrame{f.scope, f.parent, &(*f.rows)[i]};
               inputs.push_back(eval(*n.arg, rowFrame));
            }
            return aggregate(n.fn, inputs);
         } else if constexpr (std::is_same_v<T, WindowCall>) {
            if (!f.windows) throw Error(ErrorCode::TypeError, "window aggregate evaluated outside its query");
            return f.windows->at(e.get())[f.rowIndex];
         } else if constexpr (std::is_same_v<T, ScalarSubquery>) {
            Relation r = run(*n.query, &f);
            if (r.rows.empty()) return Value();
            if (r.rows.size() > 1) throw Error(ErrorCode::ScalarSubqueryCardinality, "scalar subquery returned " + std::to_string(r.rows.size()) + " rows");
            return r.rows[0][0];
         } else if constexpr (std::is_same_v<T, Exists>) {
            return Value(!run(*n.query, &f).rows.empty());
         } else {
            throw Error(ErrorCode::TypeError, "measure expressions must be expanded before execution");
         }
      },
      e->node);
}

}

Relation execute(const ResolvedQuery& query, const Database& db) {
   Executor executor(query, db);
   return executor.run(*query.query, nullptr);
}

}
