#include "measql/session.hpp"

#include "measql/csv.hpp"
#include "measql/error.hpp"
#include "measql/parser.hpp"
#include "measql/printer.hpp"

#include <fstream>
#include <sstream>

namespace measql {

std::string readFile(const std::filesystem::path& path) {
   std::ifstream in(path, std::ios::binary);
   if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
   std::stringstream buffer;
   buffer << in.rdbuf();
   return buffer.str();
}

Session Session::open(const std::filesystem::path& schema, const std::optional<std::filesystem::path>& dataDir) {
   Session s;
   s.catalog_.loadScript(readFile(schema));
   if (dataDir) s.db_ = loadDatabase(*dataDir, s.catalog_);
   return s;
}

CompiledQuery Session::compile(const ast::Query& query) const {
   ResolvedQuery analyzed = analyze(query, catalog_);
   RewriteOutput expansion = expand(analyzed);
   ResolvedQuery plan = analyze(*expansion.query, catalog_);
   return CompiledQuery{std::move(analyzed), std::move(expansion), std::move(plan)};
}

CompiledQuery Session::compile(std::string_view sql) const {
   return compile(parseQuery(sql));
}

std::string Session::transpile(std::string_view sql) const {
   return print(*compile(sql).expansion.query) + ";\n";
}

Relation Session::run(std::string_view sql) const {
   return run(parseQuery(sql));
}

Relation Session::run(const ast::Query& query) const {
   return execute(compile(query).plan, db_);
}

Relation Session::runDirect(const ast::Query& query) const {
   return execute(analyze(query, catalog_), db_);
}

std::optional<Relation> Session::runScript(std::string_view sql) {
   std::optional<Relation> last;
   for (auto& statement : parse(sql)) {
      if (auto q = statement.as<ast::Query>())
         last = run(*q);
      else
         catalog_.registerDdl(statement);
   }
   return last;
}

}
