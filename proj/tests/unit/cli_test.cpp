#include "support.hpp"

#include "cli.hpp"

#include "measql/parser.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace measql;
using measql::testing::dataDir;
using measql::testing::dataFile;

namespace {

struct Result {
   int code;
   std::string out;
   std::string err;
};

Result invoke(std::vector<std::string> args, const std::string& input = "") {
   args.insert(args.begin(), "measql");
   std::vector<char*> argv;
   for (auto& a : args) argv.push_back(a.data());
   std::istringstream in(input);
   std::ostringstream out, err;
   int code = cli::main(static_cast<int>(argv.size()), argv.data(), in, out, err);
   return {code, out.str(), err.str()};
}

std::string path(const char* name) {
   return dataFile(name).string();
}

std::string scratchFile(const std::string& name, const std::string& contents) {
   auto p = std::filesystem::temp_directory_path() / ("measql_cli_test_" + name);
   std::ofstream(p) << contents;
   return p.string();
}

Result run(const char* query, std::vector<std::string> extra = {}) {
   std::vector<std::string> args = {"run", path(query), "--schema", path("schema.sql"), "--data", dataDir().string()};
   args.insert(args.end(), extra.begin(), extra.end());
   return invoke(args);
}

}

TEST(Cli, RunWithTwoDecimals) {
   auto r = run("profit_margin.sql", {"--round", "2"});
   EXPECT_EQ(r.code, cli::kOk) << r.err;
   EXPECT_EQ(r.out,
             "prodName profitMargin count\n"
             "======== ============ =====\n"
             "Acme     0.60         1\n"
             "Happy    0.47         3\n"
             "Whizz    0.67         1\n");
}

TEST(Cli, RunProportions) {
   auto r = run("share_of_total.sql", {"--format", "csv"});
   EXPECT_EQ(r.code, cli::kOk) << r.err;
   EXPECT_EQ(r.out, "prodName,sumRevenue,proportionOfTotalRevenue\nAcme,5,0.2\nHappy,17,0.68\nWhizz,3,0.12\n");
}

TEST(Cli, RunMargins) {
   auto r = run("margin_last_year.sql");
   EXPECT_EQ(r.code, cli::kOk) << r.err;
   EXPECT_NE(r.out.find("Happy    2024      0.4286       0.3333"), std::string::npos) << r.out;
}

TEST(Cli, TranspileMatchesGolden) {
   auto r = invoke({"transpile", path("profit_margin.sql"), "--schema", path("schema.sql")});
   ASSERT_EQ(r.code, cli::kOk) << r.err;
   EXPECT_EQ(measql::testing::canonicalAliases(parseQuery(r.out)), measql::testing::canonicalAliases(parseQuery(measql::testing::readData("profit_margin.expanded.sql"))));
}

TEST(Cli, TranspiledTextRunsTheSame) {
   auto t = invoke({"transpile", path("rollup_visible.sql"), "--schema", path("schema.sql")});
   ASSERT_EQ(t.code, cli::kOk);
   std::string expanded = scratchFile("rollup_visible_expanded.sql", t.out);
   auto direct = run("rollup_visible.sql");
   auto viaText = invoke({"run", expanded, "--schema", path("schema.sql"), "--data", dataDir().string()});
   EXPECT_EQ(viaText.code, cli::kOk) << viaText.err;
   EXPECT_EQ(viaText.out, direct.out);
}

TEST(Cli, SyntaxErrorExitsOne) {
   std::string bad = scratchFile("bad.sql", "SELECT prodName,\nFROM Orders");
   auto r = invoke({"transpile", bad, "--schema", path("schema.sql")});
   EXPECT_EQ(r.code, cli::kCompileError);
   EXPECT_NE(r.err.find("line 2, column 1"), std::string::npos) << r.err;
}

TEST(Cli, AnalysisErrorExitsOne) {
   std::string bad = scratchFile("misuse.sql", "SELECT AGGREGATE(revenue) FROM Orders GROUP BY prodName");
   EXPECT_EQ(invoke({"transpile", bad, "--schema", path("schema.sql")}).code, cli::kCompileError);
}

TEST(Cli, MissingFileExitsTwo) {
   EXPECT_EQ(invoke({"transpile", "/nonexistent/q.sql", "--schema", path("schema.sql")}).code, cli::kIoError);
   EXPECT_EQ(invoke({"run", path("profit_margin.sql"), "--schema", path("schema.sql"), "--data", "/nonexistent"}).code, cli::kIoError);
}

TEST(Cli, RuntimeErrorExitsThree) {
   std::string bad = scratchFile("div.sql", "SELECT revenue / 0 FROM Orders");
   auto r = invoke({"run", bad, "--schema", path("schema.sql"), "--data", dataDir().string()});
   EXPECT_EQ(r.code, cli::kRuntimeError);
   EXPECT_NE(r.err.find("DivisionByZero"), std::string::npos) << r.err;
}

TEST(Cli, MissingSubcommand) {
   EXPECT_NE(invoke({}).code, cli::kOk);
}

TEST(Repl, SelectOne) {
   auto r = invoke({"repl", "--schema", path("schema.sql"), "--data", dataDir().string()}, "SELECT 1;\n\\quit\n");
   EXPECT_EQ(r.code, cli::kOk);
   EXPECT_NE(r.out.find("EXPR$0\n======\n1\n"), std::string::npos) << r.out;
}

TEST(Repl, MultiLineQueryMatchesRun) {
   auto r = invoke({"repl", "--schema", path("schema.sql"), "--data", dataDir().string()}, measql::testing::readData("profit_margin.sql") + ";\n");
   EXPECT_EQ(r.code, cli::kOk);
   EXPECT_NE(r.out.find(run("profit_margin.sql").out), std::string::npos) << r.out;
}

TEST(Repl, TranspileAndErrorsKeepGoing) {
   auto r = invoke({"repl", "--schema", path("schema.sql"), "--data", dataDir().string()},
                   "SELECT nope FROM Orders;\n\\transpile SELECT prodName, AGGREGATE(profitMargin) FROM EnhancedOrders GROUP BY prodName;\n\\quit\n");
   EXPECT_EQ(r.code, cli::kOk);
   EXPECT_NE(r.err.find("UnknownColumn"), std::string::npos) << r.err;
   EXPECT_NE(r.out.find("FROM Orders AS i"), std::string::npos) << r.out;
}

TEST(Repl, DdlThenQuery) {
   auto r = invoke({"repl", "--schema", path("schema.sql"), "--data", dataDir().string()},
                   "CREATE VIEW Spend AS SELECT custName, SUM(revenue) AS MEASURE spend FROM Orders;\nSELECT custName, spend FROM Spend GROUP BY custName;\n");
   EXPECT_EQ(r.code, cli::kOk) << r.err;
   EXPECT_NE(r.out.find("ok\n"), std::string::npos);
   EXPECT_NE(r.out.find("Alice    13"), std::string::npos) << r.out;
}
