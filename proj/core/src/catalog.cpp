#include "measql/catalog.hpp"

#include "measql/analyzer.hpp"
#include "measql/error.hpp"
#include "measql/parser.hpp"

namespace measql {

const ColumnDef* TableSchema::findColumn(std::string_view column) const {
   for (auto& c : columns)
      if (iequals(c.name, column)) return &c;
   return nullptr;
}

std::vector<std::string> TableSchema::nonMeasureColumns() const {
   std::vector<std::string> out;
   for (auto& c : columns)
      if (!c.isMeasure) out.push_back(c.name);
   return out;
}

bool TableSchema::hasMeasures() const {
   for (auto& c : columns)
      if (c.isMeasure) return true;
   return false;
}

void Catalog::registerDdl(const ast::Statement& statement) {
   TableSchema schema;
   if (auto table = statement.as<ast::CreateTable>()) {
      schema.name = table->name;
      for (auto& col : table->columns) {
         if (schema.findColumn(col.name)) throw Error(ErrorCode::DuplicateName, "column " + col.name + " declared twice in " + table->name);
         schema.columns.push_back(ColumnDef{col.name, col.type, false, std::nullopt});
      }
   } else if (auto view = statement.as<ast::CreateView>()) {
      schema.name = view->name;
      if (find(view->name)) throw Error(ErrorCode::DuplicateName, "table or view " + view->name + " already exists");
      ResolvedQuery resolved = analyze(*view->query, *this);
      const ast::Select& select = resolved.query->select;
      for (size_t i = 0; i < resolved.columns.size(); ++i) {
         auto& col = resolved.columns[i];
         if (schema.findColumn(col.name)) throw Error(ErrorCode::DuplicateName, "column " + col.name + " appears twice in view " + view->name);
         ColumnDef def{col.name, col.type.value_or(ScalarType::Varchar), col.isMeasure, std::nullopt};
         if (col.isMeasure) def.formula = std::get<ast::SelectItem>(select.items[i]).expr;
         schema.columns.push_back(std::move(def));
      }
      schema.viewQuery = view->query;
   } else {
      throw Error(ErrorCode::Analysis, "only CREATE TABLE and CREATE VIEW may be registered");
   }
   if (find(schema.name)) throw Error(ErrorCode::DuplicateName, "table or view " + schema.name + " already exists");
   order_.push_back(schema.name);
   tables_.emplace(schema.name, std::move(schema));
}

void Catalog::loadScript(std::string_view ddl) {
   for (auto& statement : parse(ddl)) registerDdl(statement);
}

const TableSchema& Catalog::resolve(std::string_view name) const {
   if (auto t = find(name)) return *t;
   throw Error(ErrorCode::UnknownTable, "table " + std::string(name) + " not found");
}

const TableSchema* Catalog::find(std::string_view name) const {
   auto it = tables_.find(name);
   return it == tables_.end() ? nullptr : &it->second;
}

std::vector<const TableSchema*> Catalog::baseTables() const {
   std::vector<const TableSchema*> out;
   for (auto& name : order_)
      if (auto t = find(name); t && !t->isView()) out.push_back(t);
   return out;
}

std::vector<std::string> Catalog::dimensionality(const TableSchema& table, std::string_view measure) const {
   auto column = table.findColumn(measure);
   if (!column || !column->isMeasure) throw Error(ErrorCode::NotAMeasure, std::string(measure) + " is not a measure of " + table.name);
   return table.nonMeasureColumns();
}

}
