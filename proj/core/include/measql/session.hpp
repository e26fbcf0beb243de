#pragma once

#include "measql/analyzer.hpp"
#include "measql/catalog.hpp"
#include "measql/engine.hpp"
#include "measql/rewriter.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace measql {

/// A query through every stage of the pipeline
struct CompiledQuery {
   ResolvedQuery analyzed;
   RewriteOutput expansion;
   /// The expansion analyzed as plain SQL, ready to execute
   ResolvedQuery plan;
};

/// Catalog plus data; the front door used by the CLI and the tests
class Session {
   public:
   Session() = default;
   Session(Catalog catalog, Database db) : catalog_(std::move(catalog)), db_(std::move(db)) {}

   /// Reads a DDL script and, when given, the CSV files of a data directory
   static Session open(const std::filesystem::path& schema, const std::optional<std::filesystem::path>& dataDir);

   Catalog& catalog() { return catalog_; }
   const Catalog& catalog() const { return catalog_; }
   Database& database() { return db_; }
   const Database& database() const { return db_; }

   CompiledQuery compile(const ast::Query& query) const;
   /// Text must hold exactly one query
   CompiledQuery compile(std::string_view sql) const;
   std::string transpile(std::string_view sql) const;
   Relation run(std::string_view sql) const;
   Relation run(const ast::Query& query) const;
   /// Executes without the rewriter; only valid for measure-free queries
   Relation runDirect(const ast::Query& query) const;

   /// Runs a script: DDL is registered, the result of the last query is returned
   std::optional<Relation> runScript(std::string_view sql);

   private:
   Catalog catalog_;
   Database db_;
};

std::string readFile(const std::filesystem::path& path);

}
