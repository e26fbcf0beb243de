#pragma once

#include "measql/ast.hpp"
#include "measql/names.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace measql {

struct ColumnDef {
   std::string name;
   ScalarType type;
   bool isMeasure = false;
   /// Measure formula with sibling measures inlined; present iff isMeasure
   std::optional<ast::ExprPtr> formula;
};

struct TableSchema {
   std::string name;
   std::vector<ColumnDef> columns;
   /// View body as written; absent for base tables
   std::optional<ast::QueryPtr> viewQuery;

   bool isView() const { return viewQuery.has_value(); }
   const ColumnDef* findColumn(std::string_view column) const;
   std::vector<std::string> nonMeasureColumns() const;
   bool hasMeasures() const;
};

/// Schemas of base tables and views. Mutable while loading DDL, read-only afterwards.
class Catalog {
   public:
   /// Registers CREATE TABLE or CREATE VIEW; views are analyzed first.
   void registerDdl(const ast::Statement& statement);
   /// Parses and registers every statement of a DDL script
   void loadScript(std::string_view ddl);

   const TableSchema& resolve(std::string_view name) const;
   const TableSchema* find(std::string_view name) const;
   /// Base tables in registration order
   std::vector<const TableSchema*> baseTables() const;

   /// Non-measure columns of the table that defines the measure
   std::vector<std::string> dimensionality(const TableSchema& table, std::string_view measure) const;

   private:
   std::map<std::string, TableSchema, CaseInsensitiveLess> tables_;
   std::vector<std::string> order_;
};

}
