#include "generators.hpp"
#include "support.hpp"

#include "measql/analyzer.hpp"
#include "measql/parser.hpp"
#include "measql/printer.hpp"

#include <gtest/gtest.h>

using namespace measql;
using namespace measql::ast;
using measql::testing::readData;
using measql::testing::sampleCatalog;

namespace {

const Catalog& catalog() {
   static const Catalog c = sampleCatalog();
   return c;
}

ResolvedQuery analyzeText(std::string_view sql) {
   return analyze(parseQuery(sql), catalog());
}

std::optional<ErrorCode> failure(std::string_view sql) {
   return MEASQL_ERROR_CODE(analyzeText(sql));
}

const ExprPtr& itemExpr(const ResolvedQuery& r, size_t i) {
   return std::get<SelectItem>(r.query->select.items.at(i)).expr;
}

std::vector<std::string> names(const ResolvedQuery& r) {
   std::vector<std::string> out;
   for (auto& c : r.columns) out.push_back(c.name);
   return out;
}

}

TEST(Analyzer, AggregateOverViewMeasure) {
   auto r = analyzeText(readData("profit_margin.sql"));
   EXPECT_EQ(names(r), (std::vector<std::string>{"prodName", "profitMargin", "count"}));
   EXPECT_EQ(r.columns[1].type, ScalarType::Double);
   EXPECT_EQ(r.columns[2].type, ScalarType::Integer);
   auto& info = r.info(*itemExpr(r, 1));
   EXPECT_EQ(info.type, ScalarType::Double);
   EXPECT_FALSE(info.isMeasure);
   auto& scope = r.scope(r.query->select);
   EXPECT_TRUE(scope.grouped);
   ASSERT_EQ(scope.items.size(), 1u);
   EXPECT_EQ(scope.items[0].dimensions(), (std::vector<std::string>{"orderDate", "prodName"}));
}

TEST(Analyzer, NormalizesNamesAndInlinesViews) {
   auto r = analyzeText("SELECT prodName, COUNT(*) FROM EnhancedOrders GROUP BY prodName");
   std::string text = print(*r.query);
   EXPECT_NE(text.find("EnhancedOrders.prodName AS prodName"), std::string::npos) << text;
   EXPECT_NE(text.find("FROM (SELECT"), std::string::npos) << text;
   EXPECT_NE(text.find(") AS EnhancedOrders"), std::string::npos) << text;
   // the normal form is stable
   EXPECT_EQ(*analyze(*r.query, catalog()).query, *r.query);
}

TEST(Analyzer, StarSkipsMeasures) {
   auto r = analyzeText("SELECT * FROM EnhancedOrders");
   EXPECT_EQ(names(r), (std::vector<std::string>{"orderDate", "prodName"}));
}

TEST(Analyzer, UsingJoinStarListsSharedColumnOnce) {
   auto r = analyzeText("SELECT * FROM Orders JOIN Customers USING (custName)");
   EXPECT_EQ(names(r), (std::vector<std::string>{"prodName", "custName", "orderDate", "revenue", "cost", "custAge"}));
}

TEST(Analyzer, UnaliasedDerivedTableGetsName) {
   auto r = analyzeText(readData("margin_last_year.sql"));
   auto& from = r.query->select.from.at(0);
   auto sub = from.as<SubqueryRef>();
   ASSERT_TRUE(sub);
   EXPECT_EQ(sub->alias, "t$0");
   EXPECT_EQ(names(r), (std::vector<std::string>{"prodName", "orderYear", "profitMargin", "profitMarginLastYear"}));
}

TEST(Analyzer, BareMeasureUsesImplicitContext) {
   auto r = analyzeText(readData("rollup_visible.sql"));
   auto& info = r.info(*itemExpr(r, 4));
   EXPECT_TRUE(info.isMeasure);
   EXPECT_EQ(info.site, MeasureSite::GroupedSelect);
   EXPECT_EQ(r.columns[4].name, "r");
   EXPECT_TRUE(r.scope(r.query->select).rollup);
}

TEST(Analyzer, MeasureInWhereWithExplicitContext) {
   auto r = analyzeText(readData("above_average_measure.sql"));
   auto cmp = (*r.query->select.where)->as<Binary>();
   ASSERT_TRUE(cmp);
   auto at = cmp->right->as<AtExpr>();
   ASSERT_TRUE(at);
   EXPECT_EQ(r.info(*cmp->right).type, ScalarType::Double);
   EXPECT_EQ(r.info(*at->base).site, MeasureSite::Where);
}

TEST(Analyzer, CustomerMeasureAcrossJoin) {
   auto r = analyzeText(readData("customer_ages.sql"));
   EXPECT_EQ(names(r), (std::vector<std::string>{"prodName", "orderCount", "weightedAvgAge", "avgAge", "visibleAvgAge"}));
   EXPECT_EQ(r.columns[3].type, ScalarType::Double);
}

TEST(Analyzer, AggregateOfNonMeasure) {
   EXPECT_EQ(failure("SELECT AGGREGATE(revenue) FROM Orders GROUP BY prodName"), ErrorCode::MeasureMisuse);
}

TEST(Analyzer, AggregateFunctionOverMeasure) {
   EXPECT_EQ(failure("SELECT SUM(profitMargin) FROM EnhancedOrders"), ErrorCode::MeasureMisuse);
}

TEST(Analyzer, UnknownAndAmbiguousColumns) {
   EXPECT_EQ(failure("SELECT nope FROM Orders"), ErrorCode::UnknownColumn);
   EXPECT_EQ(failure("SELECT x.prodName FROM Orders AS o"), ErrorCode::UnknownColumn);
   EXPECT_EQ(failure("SELECT custName FROM Orders, Customers"), ErrorCode::AmbiguousColumn);
   EXPECT_EQ(failure("SELECT 1 FROM Nope"), ErrorCode::UnknownTable);
}

TEST(Analyzer, CurrentOutsideSet) {
   EXPECT_EQ(failure("SELECT CURRENT prodName FROM Orders"), ErrorCode::InvalidCurrent);
   EXPECT_EQ(failure("SELECT prodName, profitMargin AT (WHERE prodName = CURRENT prodName) FROM EnhancedOrders GROUP BY prodName"), ErrorCode::InvalidCurrent);
}

TEST(Analyzer, ModifierOnNonDimension) {
   const char* sql = "SELECT o.prodName, o.m AT (ALL revenue) FROM (SELECT prodName, SUM(revenue) AS MEASURE m FROM Orders) AS o GROUP BY o.prodName";
   EXPECT_EQ(failure(sql), ErrorCode::NonDimensionModifier);
}

TEST(Analyzer, ModifierCanNameSelectAlias) {
   // orderYear is a select alias of the enclosing query, not a column of the view
   const char* sql = "SELECT prodName, YEAR(orderDate) AS orderYear, profitMargin AT (SET orderYear = 2023) FROM EnhancedOrders GROUP BY prodName, YEAR(orderDate)";
   EXPECT_NO_THROW(analyzeText(sql));
}

TEST(Analyzer, TypeMismatch) {
   EXPECT_EQ(failure("SELECT prodName + 1 FROM Orders"), ErrorCode::TypeMismatch);
   EXPECT_EQ(failure("SELECT prodName FROM Orders WHERE revenue"), ErrorCode::TypeMismatch);
}

TEST(Analyzer, UngroupedColumnInGroupedQuery) {
   EXPECT_EQ(failure("SELECT custName, COUNT(*) FROM Orders GROUP BY prodName"), ErrorCode::Analysis);
}

TEST(Analyzer, NonAggregatableFormula) {
   EXPECT_EQ(failure("SELECT revenue + 1 AS MEASURE m FROM Orders"), ErrorCode::NonAggregatableMeasure);
   EXPECT_NO_THROW(analyzeText("SELECT custName, AVG(custAge) AS MEASURE avgAge FROM Customers"));
   EXPECT_NO_THROW(analyzeText("SELECT (SUM(revenue) - SUM(cost)) / SUM(revenue) AS MEASURE m FROM Orders"));
}

TEST(Analyzer, MeasureCycle) {
   EXPECT_EQ(failure("SELECT prodName, SUM(revenue) + b AS MEASURE a, a * 2 AS MEASURE b FROM Orders"), ErrorCode::MeasureCycle);
}

TEST(Analyzer, GroupingOnlyOverKeys) {
   EXPECT_NO_THROW(analyzeText("SELECT prodName, GROUPING(prodName) FROM Orders GROUP BY ROLLUP(prodName)"));
   EXPECT_EQ(failure("SELECT GROUPING(custName) FROM Orders GROUP BY ROLLUP(prodName)"), ErrorCode::Analysis);
   EXPECT_EQ(failure("SELECT prodName FROM Orders WHERE GROUPING(prodName) = 1 GROUP BY prodName"), ErrorCode::Analysis);
}

TEST(Analyzer, CorrelatedGroupingFromSubquery) {
   // what the rewriter produces for ROLLUP: GROUPING of the outer key inside a subquery's WHERE
   EXPECT_NO_THROW(analyzeText(
      "SELECT o.prodName, (SELECT SUM(i.revenue) FROM Orders AS i WHERE GROUPING(o.prodName) = 1 OR i.prodName = o.prodName) FROM Orders AS o GROUP BY ROLLUP(o.prodName)"));
}

TEST(DefaultOutputName, Kinds) {
   EXPECT_EQ(defaultOutputName(*parseExpression("o.prodName"), 0), "prodName");
   EXPECT_EQ(defaultOutputName(*parseExpression("COUNT(*)"), 2), "count");
   EXPECT_EQ(defaultOutputName(*parseExpression("AGGREGATE(o.m)"), 1), "m");
   EXPECT_EQ(defaultOutputName(*parseExpression("o.m AT (VISIBLE)"), 1), "m");
   EXPECT_EQ(defaultOutputName(*parseExpression("a + 1"), 3), "EXPR$3");
}
