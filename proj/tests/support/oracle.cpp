#include "oracle.hpp"

#include "measql/names.hpp"

#include <set>
#include <stdexcept>

namespace measql::testing::oracle {

namespace {

size_t col(const Relation& r, const char* name) {
   for (size_t i = 0; i < r.columnNames.size(); ++i)
      if (iequals(r.columnNames[i], name)) return i;
   throw std::out_of_range(name);
}

struct Sum {
   int64_t total = 0;
   size_t count = 0;
   void add(const Value& v) {
      if (v.isNull()) return;
      total += v.asInteger();
      ++count;
   }
   Value value() const { return count ? Value(total) : Value(); }
   Value avg() const { return count ? Value(static_cast<double>(total) / static_cast<double>(count)) : Value(); }
};

Value divide(const Value& a, const Value& b) {
   if (a.isNull() || b.isNull()) return {};
   return Value(a.toDouble() / b.toDouble());
}

std::optional<int> yearOf(const Value& v) {
   if (v.isNull()) return std::nullopt;
   return v.asDate().year();
}

bool sameValue(const Value& a, const Value& b) {
   return a == b;
}

}

Product productOf(const Value& v) {
   if (v.isNull()) return std::nullopt;
   return v.asString();
}

std::map<Product, ProportionRow> proportionOfTotal(const Database& db) {
   auto& orders = db.table("Orders");
   size_t prod = col(orders, "prodName"), rev = col(orders, "revenue");
   std::map<Product, Sum> sums;
   Sum total;
   for (auto& row : orders.rows) {
      sums[productOf(row[prod])].add(row[rev]);
      total.add(row[rev]);
   }
   std::map<Product, ProportionRow> out;
   for (auto& [p, s] : sums) out[p] = ProportionRow{s.value(), divide(s.value(), total.value())};
   return out;
}

std::map<Product, MarginRow> marginByYear(const Database& db, int year) {
   auto& orders = db.table("Orders");
   size_t prod = col(orders, "prodName"), date = col(orders, "orderDate"), rev = col(orders, "revenue"), cost = col(orders, "cost");
   auto margin = [&](const Product& p, int y) {
      Sum r, c;
      for (auto& row : orders.rows) {
         if (productOf(row[prod]) != p || yearOf(row[date]) != y) continue;
         r.add(row[rev]);
         c.add(row[cost]);
      }
      Value diff = r.value().isNull() || c.value().isNull() ? Value() : Value(r.value().asInteger() - c.value().asInteger());
      return divide(diff, r.value());
   };
   std::map<Product, MarginRow> out;
   for (auto& row : orders.rows) {
      if (yearOf(row[date]) != year) continue;
      Product p = productOf(row[prod]);
      if (!out.count(p)) out[p] = MarginRow{margin(p, year), margin(p, year - 1)};
   }
   return out;
}

std::map<Product, AgeRow> customerAges(const Database& db) {
   auto& orders = db.table("Orders");
   auto& customers = db.table("Customers");
   size_t prod = col(orders, "prodName"), ocust = col(orders, "custName");
   size_t cname = col(customers, "custName"), age = col(customers, "custAge");

   Sum everyone;
   for (auto& c : customers.rows) everyone.add(c[age]);

   // joined rows that survive the filter, grouped by product
   std::map<Product, std::vector<const Row*>> groups;
   for (auto& o : orders.rows)
      for (auto& c : customers.rows) {
         if (o[ocust].isNull() || c[cname].isNull() || o[ocust].asString() != c[cname].asString()) continue;
         if (c[age].isNull() || c[age].asInteger() < 18) continue;
         groups[productOf(o[prod])].push_back(&c);
      }

   std::map<Product, AgeRow> out;
   for (auto& [p, joined] : groups) {
      AgeRow r;
      r.orderCount = static_cast<int64_t>(joined.size());
      Sum weighted;
      for (auto c : joined) weighted.add((*c)[age]);
      r.weightedAvgAge = weighted.avg();
      r.avgAge = everyone.avg();
      // a customer row is visible when some joined row of the group carries its values
      Sum visible;
      for (auto& c : customers.rows) {
         bool seen = false;
         for (auto j : joined)
            if (sameValue((*j)[cname], c[cname]) && sameValue((*j)[age], c[age])) seen = true;
         if (seen) visible.add(c[age]);
      }
      r.visibleAvgAge = visible.avg();
      out[p] = r;
   }
   return out;
}

}
