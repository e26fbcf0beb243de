#include "cli.hpp"

#include "measql/error.hpp"
#include "measql/render.hpp"
#include "measql/session.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace measql::cli {

namespace {

int report(const Error& e, std::ostream& err) {
   err << "error: " << e.what() << "\n";
   if (e.isIoError()) return kIoError;
   if (e.isCompileError()) return kCompileError;
   return kRuntimeError;
}

void render(const Relation& rel, const RunConfig& config, std::ostream& out) {
   RenderOptions options{config.round};
   out << (config.format == OutputFormat::Csv ? renderCsv(rel, options) : renderTable(rel, options));
}

std::string trim(const std::string& s) {
   auto b = s.find_first_not_of(" \t\r\n");
   if (b == std::string::npos) return "";
   auto e = s.find_last_not_of(" \t\r\n");
   return s.substr(b, e - b + 1);
}

}

int cmdTranspile(const std::filesystem::path& queryPath, const std::filesystem::path& schemaPath, std::ostream& out, std::ostream& err) {
   try {
      Session session = Session::open(schemaPath, std::nullopt);
      out << session.transpile(readFile(queryPath));
      return kOk;
   } catch (const Error& e) {
      return report(e, err);
   }
}

int cmdRun(const std::filesystem::path& queryPath, const RunConfig& config, std::ostream& out, std::ostream& err) {
   try {
      Session session = Session::open(config.schemaPath, config.dataDir);
      std::string sql = readFile(queryPath);
      render(session.run(sql), config, out);
      return kOk;
   } catch (const Error& e) {
      return report(e, err);
   }
}

int cmdRepl(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
   Session session;
   try {
      session = Session::open(config.schemaPath, config.dataDir);
   } catch (const Error& e) {
      return report(e, err);
   }
   std::string buffer;
   std::string line;
   while (true) {
      out << (buffer.empty() ? "measql> " : "   ...> ") << std::flush;
      if (!std::getline(in, line)) break;
      if (buffer.empty() && trim(line) == "\\quit") return kOk;
      buffer += line + "\n";
      if (trim(line).empty() || trim(line).back() != ';') continue;
      std::string statement = trim(buffer);
      buffer.clear();
      bool transpileOnly = false;
      if (statement.rfind("\\transpile", 0) == 0) {
         transpileOnly = true;
         statement = statement.substr(10);
      }
      try {
         if (transpileOnly) {
            out << session.transpile(statement);
         } else if (auto rel = session.runScript(statement)) {
            render(*rel, config, out);
         } else {
            out << "ok\n";
         }
      } catch (const Error& e) {
         report(e, err);
      }
   }
   out << "\n";
   return kOk;
}

int main(int argc, char** argv, std::istream& in, std::ostream& out, std::ostream& err) {
   CLI::App app{"measql: SQL with measures, transpiled to plain SQL"};
   app.require_subcommand(1);

   std::string queryPath, schemaPath, dataDir, format = "table";
   std::optional<int> round;

   auto transpile = app.add_subcommand("transpile", "Print the measure-free expansion of a query");
   transpile->add_option("query", queryPath, "Query file")->required();
   transpile->add_option("--schema", schemaPath, "DDL script")->required();

   auto run = app.add_subcommand("run", "Run a query over CSV data");
   run->add_option("query", queryPath, "Query file")->required();
   run->add_option("--schema", schemaPath, "DDL script")->required();
   run->add_option("--data", dataDir, "Directory of <table>.csv files")->required();
   run->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
   run->add_option("--round", round, "Fixed decimals for doubles");

   auto repl = app.add_subcommand("repl", "Interactive shell");
   repl->add_option("--schema", schemaPath, "DDL script")->required();
   repl->add_option("--data", dataDir, "Directory of <table>.csv files");
   repl->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
   repl->add_option("--round", round, "Fixed decimals for doubles");

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? kOk : kCompileError;
   }

   RunConfig config;
   config.schemaPath = schemaPath;
   if (!dataDir.empty()) config.dataDir = dataDir;
   config.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Table;
   config.round = round;

   if (*transpile) return cmdTranspile(queryPath, schemaPath, out, err);
   if (*run) return cmdRun(queryPath, config, out, err);
   return cmdRepl(config, in, out, err);
}

}
