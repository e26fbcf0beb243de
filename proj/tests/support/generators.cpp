#include "generators.hpp"

#include "support.hpp"

namespace measql::testing {

using namespace ast;

bool AstGenerator::chance(double p) {
   return std::bernoulli_distribution(p)(rng_);
}

size_t AstGenerator::pick(size_t n) {
   return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
}

int AstGenerator::range(int lo, int hi) {
   return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

std::string AstGenerator::identifier() {
   // includes names that only survive printing when quoted
   static const std::vector<std::string> names = {"prodName", "custName", "revenue", "o", "c1", "x_y", "T$2", "order", "two words", "Select", "weird\"quote"};
   return names[pick(names.size())];
}

ExprPtr AstGenerator::leaf() {
   switch (pick(8)) {
      case 0: return column("", identifier());
      case 1: return column(identifier(), identifier());
      case 2: return literal(Value(range(-50, 50)));
      case 3: return literal(Value(range(-40, 40) / 4.0));
      case 4: return literal(Value(chance(0.5) ? std::string("it's") : std::string("Happy")));
      case 5: return literal(Value(Date::fromYmd(range(1999, 2030), static_cast<unsigned>(range(1, 12)), static_cast<unsigned>(range(1, 28)))));
      case 6: return literal(Value(chance(0.5)));
      default: return literal(Value());
   }
}

ContextModifier AstGenerator::modifier(unsigned depth) {
   switch (pick(5)) {
      case 0: return AllBare{};
      case 1: {
         AllDims all;
         for (int i = range(1, 2); i > 0; --i) all.dimensions.push_back(chance(0.7) ? column("", identifier()) : expr(depth));
         return all;
      }
      case 2: {
         ExprPtr value = chance(0.5) ? binary(BinaryOp::Sub, Expr{CurrentRef{column("", identifier())}}, literal(Value(1))) : expr(depth);
         return SetDim{column("", identifier()), value};
      }
      case 3: return Visible{};
      default: return WherePred{expr(depth)};
   }
}

ExprPtr AstGenerator::expr(unsigned depth) {
   if (depth == 0 || chance(0.25)) return leaf();
   unsigned d = depth - 1;
   static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                  BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge, BinaryOp::And, BinaryOp::Or, BinaryOp::IsNotDistinctFrom};
   static const AggregateFn fns[] = {AggregateFn::Sum, AggregateFn::Count, AggregateFn::Avg};
   switch (pick(11)) {
      case 0: return unary(chance(0.5) ? UnaryOp::Not : UnaryOp::Neg, expr(d));
      case 1:
      case 2: return binary(ops[pick(std::size(ops))], expr(d), expr(d));
      case 3: {
         std::vector<ExprPtr> args;
         for (int i = range(0, 2); i > 0; --i) args.push_back(expr(d));
         static const char* names[] = {"YEAR", "GROUPING", "lower"};
         return function(names[pick(3)], std::move(args));
      }
      case 4: return chance(0.2) ? aggregate(AggregateFn::CountStar, std::nullopt) : aggregate(fns[pick(3)], expr(d));
      case 5: {
         WindowCall w{fns[pick(3)], expr(d), {}};
         if (chance(0.3)) {
            w.fn = AggregateFn::CountStar;
            w.arg.reset();
         }
         for (int i = range(0, 2); i > 0; --i) w.partitionBy.push_back(expr(d));
         return Expr{std::move(w)};
      }
      case 6: return Expr{AggregateMeasureCall{expr(d)}};
      case 7: {
         AtExpr at{expr(d), {}};
         for (int i = range(1, 3); i > 0; --i) at.modifiers.push_back(modifier(d));
         return Expr{std::move(at)};
      }
      case 8: return Expr{CurrentRef{chance(0.7) ? column("", identifier()) : expr(d)}};
      case 9: return scalarSubquery(query(d / 2));
      default: return exists(query(d / 2));
   }
}

TableExpr AstGenerator::tableItem(unsigned depth) {
   if (depth > 0 && chance(0.3)) return TableExpr{SubqueryRef{QueryPtr(query(depth - 1)), chance(0.8) ? identifier() : ""}};
   return TableExpr{TableRef{identifier(), chance(0.6) ? identifier() : ""}};
}

TableExpr AstGenerator::fromEntry(unsigned depth) {
   TableExpr t = tableItem(depth);
   for (int joins = range(0, 2); joins > 0; --joins) {
      Join j{chance(0.5) ? JoinKind::Inner : JoinKind::Left, Box<TableExpr>(t), Box<TableExpr>(tableItem(depth)), std::nullopt, {}};
      if (chance(0.6)) {
         j.on = expr(1);
      } else {
         for (int i = range(1, 2); i > 0; --i) j.usingColumns.push_back(identifier());
      }
      t = TableExpr{std::move(j)};
   }
   return t;
}

Query AstGenerator::query(unsigned depth) {
   Query q;
   if (depth > 1 && chance(0.2)) q.with.push_back(CommonTableExpr{identifier(), QueryPtr(query(depth - 1))});
   unsigned ed = std::min(depth + 1, 3u);
   for (int i = range(1, 3); i > 0; --i) {
      if (chance(0.15)) {
         q.select.items.push_back(StarItem{chance(0.5) ? identifier() : ""});
      } else {
         bool measure = chance(0.15);
         std::string alias = measure || chance(0.5) ? identifier() : "";
         q.select.items.push_back(SelectItem{expr(ed), alias, measure});
      }
   }
   for (int i = range(1, 2); i > 0; --i) q.select.from.push_back(fromEntry(depth));
   if (chance(0.5)) q.select.where = expr(ed);
   if (chance(0.4)) {
      GroupBy g{chance(0.3), {}};
      int keys = g.rollup ? range(1, 3) : range(0, 3);
      for (int i = 0; i < keys; ++i) g.keys.push_back(expr(1));
      q.select.groupBy = g;
   }
   if (chance(0.2)) q.select.having = expr(ed);
   for (int i = chance(0.3) ? range(1, 2) : 0; i > 0; --i) q.orderBy.push_back(OrderItem{expr(1), chance(0.5)});
   return q;
}

//---------------------------------------------------------------------------

Catalog sampleCatalog() {
   Catalog catalog;
   catalog.loadScript(readData("schema.sql"));
   return catalog;
}

Database randomDatabase(std::mt19937& rng) {
   auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
   auto range = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
   static const char* products[] = {"Happy", "Acme", "Whizz"};
   static const char* names[] = {"Alice", "Bob", "Celia", "Dan"};
   int productCount = range(1, 3);

   Relation customers{{"custName", "custAge"}, {}};
   for (auto name : names)
      if (chance(0.85)) customers.rows.push_back({Value(name), chance(0.1) ? Value() : Value(range(10, 60))});
   if (chance(0.2)) customers.rows.push_back({Value(), Value(range(10, 60))});

   Relation orders{{"prodName", "custName", "orderDate", "revenue", "cost"}, {}};
   for (int n = range(0, 50); n > 0; --n) {
      Row row;
      row.push_back(chance(0.1) ? Value() : Value(products[range(0, productCount - 1)]));
      row.push_back(chance(0.1) ? Value() : Value(names[range(0, 3)]));
      row.push_back(chance(0.05) ? Value() : Value(Date::fromYmd(range(2022, 2024), static_cast<unsigned>(range(1, 12)), static_cast<unsigned>(range(1, 28)))));
      int revenue = range(1, 9);
      row.push_back(chance(0.1) ? Value() : Value(revenue));
      row.push_back(chance(0.1) ? Value() : Value(range(0, revenue)));
      orders.rows.push_back(std::move(row));
   }

   Database db;
   db.add("Orders", std::move(orders));
   db.add("Customers", std::move(customers));
   return db;
}

Database duplicateOrders(const Database& db, std::mt19937& rng) {
   Database out = db;
   Relation& orders = *out.findMutable("Orders");
   std::vector<Row> rows;
   for (auto& row : orders.rows)
      for (int k = std::uniform_int_distribution<int>(1, 3)(rng); k > 0; --k) rows.push_back(row);
   orders.rows = std::move(rows);
   return out;
}

}
