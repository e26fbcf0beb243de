#pragma once

#include "measql/analyzer.hpp"
#include "measql/names.hpp"
#include "measql/value.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace measql {

using Row = std::vector<Value>;

struct Relation {
   std::vector<std::string> columnNames;
   std::vector<Row> rows;

   bool operator==(const Relation&) const = default;
};

/// Table name to contents. Columns follow the registered schema's order.
class Database {
   public:
   void add(const std::string& table, Relation relation);
   const Relation& table(std::string_view name) const;
   const Relation* find(std::string_view name) const;
   Relation* findMutable(std::string_view name);

   private:
   std::map<std::string, Relation, CaseInsensitiveLess> tables_;
};

/// Runs an analyzed measure-free query
Relation execute(const ResolvedQuery& query, const Database& db);

Value aggregate(ast::AggregateFn fn, const std::vector<Value>& inputs);

}
