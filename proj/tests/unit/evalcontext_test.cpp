#include "measql/evalcontext.hpp"
#include "measql/parser.hpp"
#include "measql/printer.hpp"

#include <gtest/gtest.h>

using namespace measql;
using namespace measql::ast;

namespace {

ExprPtr dim(const char* name) {
   return column("", name);
}

/// Grouped call site with the given keys, each over the measure's table
CallSite groupedSite(std::vector<std::pair<ExprPtr, std::optional<ExprPtr>>> keys, bool rollup = false) {
   CallSite site;
   site.grouped = true;
   site.rollup = rollup;
   site.measureAlias = "o";
   for (auto& [key, d] : keys) {
      site.keys.push_back(key);
      site.keyDimensions.push_back(d);
   }
   return site;
}

CallSite happySite() {
   return groupedSite({{column("o", "prodName"), dim("prodName")}});
}

EvaluationContext constant(std::vector<std::pair<const char*, Value>> dims) {
   EvaluationContext ctx;
   for (auto& [d, v] : dims) ctx.terms.push_back(ContextTerm{DimEquals{dim(d), literal(v), std::nullopt}, TermOrigin::GroupKey});
   return ctx;
}

std::string predicate(const EvaluationContext& ctx, const char* alias = "i") {
   return print(*toRowPredicate(ctx, alias));
}

}

TEST(ImplicitContext, GroupKeyBecomesDimensionTerm) {
   auto ctx = implicitContext(happySite());
   ASSERT_EQ(ctx.terms.size(), 1u);
   EXPECT_EQ(ctx.terms[0].origin, TermOrigin::GroupKey);
   EXPECT_EQ(predicate(ctx), "i.prodName IS NOT DISTINCT FROM o.prodName");
}

TEST(ImplicitContext, KeysOutsideTheMeasureTableAreDropped) {
   // customer measure grouped by an order column: nothing constrains Customers
   CallSite site = groupedSite({{column("o", "prodName"), std::nullopt}});
   EXPECT_TRUE(implicitContext(site).isTrue());
}

TEST(ImplicitContext, RollupGuardsEachKey) {
   auto ctx = implicitContext(groupedSite({{column("o", "prodName"), dim("prodName")}}, true));
   EXPECT_EQ(predicate(ctx), "GROUPING(o.prodName) = 1 OR i.prodName IS NOT DISTINCT FROM o.prodName");
}

TEST(ImplicitContext, UngroupedUsesEveryDimension) {
   CallSite site;
   site.measureAlias = "o";
   site.dimensions = {"prodName", "custName"};
   EXPECT_EQ(predicate(implicitContext(site)), "i.prodName IS NOT DISTINCT FROM o.prodName AND i.custName IS NOT DISTINCT FROM o.custName");
}

TEST(ApplyModifier, AllDimensionClearsIt) {
   auto ctx = applyModifier(constant({{"prodName", Value("Happy")}}), AllDims{{dim("prodName")}}, {});
   EXPECT_TRUE(ctx.isTrue());
}

TEST(ApplyModifier, AllLeavesOtherDimensions) {
   auto ctx = applyModifier(constant({{"prodName", Value("Happy")}, {"custName", Value("Bob")}}), AllDims{{dim("custName")}}, {});
   EXPECT_EQ(ctx, constant({{"prodName", Value("Happy")}}));
}

TEST(ApplyModifier, SetWithCurrent) {
   auto mod = std::get<AtExpr>(parseExpression("m AT (SET orderYear = CURRENT orderYear - 1)")->node).modifiers[0];
   auto ctx = applyModifier(constant({{"prodName", Value("Happy")}, {"orderYear", Value(2024)}}), mod, {});
   ASSERT_EQ(ctx.terms.size(), 2u);
   EXPECT_EQ(ctx.terms[1].origin, TermOrigin::SetModifier);
   EXPECT_EQ(predicate(ctx), "i.prodName IS NOT DISTINCT FROM 'Happy' AND i.orderYear IS NOT DISTINCT FROM 2024 - 1");
}

TEST(ApplyModifier, VisibleAddsCallSiteFilters) {
   CallSite site = happySite();
   site.visibleTerms.push_back(ContextTerm{Pred{parseExpression("custName <> 'Bob'")}, TermOrigin::VisibleWhere});
   auto ctx = applyModifier(implicitContext(site), Visible{}, site);
   EXPECT_EQ(predicate(ctx), "i.prodName IS NOT DISTINCT FROM o.prodName AND i.custName <> 'Bob'");
   // a second VISIBLE adds nothing
   EXPECT_EQ(applyModifier(ctx, Visible{}, site), ctx);
}

TEST(ApplyModifier, WhereReplacesTheContext) {
   auto ctx = applyModifier(constant({{"prodName", Value("Happy")}}), WherePred{parseExpression("prodName = o.prodName")}, {});
   ASSERT_EQ(ctx.terms.size(), 1u);
   EXPECT_EQ(ctx.terms[0].origin, TermOrigin::WhereModifier);
   EXPECT_EQ(predicate(ctx, "x"), "x.prodName = o.prodName");
}

TEST(ApplySequence, VisibleThenAll) {
   CallSite site = happySite();
   site.visibleTerms.push_back(ContextTerm{Pred{parseExpression("custName <> 'Bob'")}, TermOrigin::VisibleWhere});
   auto ctx = applySequence(EvaluationContext{}, {Visible{}, AllDims{{dim("prodName")}}}, site);
   EXPECT_EQ(predicate(ctx), "i.custName <> 'Bob'");
}

TEST(ApplySequence, EmptyIsIdentity) {
   auto ctx = constant({{"prodName", Value("Happy")}});
   EXPECT_EQ(applySequence(ctx, {}, {}), ctx);
}

TEST(ApplySequence, ClearThenSet) {
   auto ctx = applySequence(constant({{"prodName", Value("Happy")}}), {AllBare{}, SetDim{dim("prodName"), literal(Value("Acme"))}}, {});
   EXPECT_EQ(predicate(ctx), "i.prodName IS NOT DISTINCT FROM 'Acme'");
}

TEST(CurrentValue, Constrained) {
   EXPECT_EQ(*currentValue(constant({{"orderYear", Value(2024)}}), dim("orderYear")), *literal(Value(2024)));
}

TEST(CurrentValue, UnconstrainedIsNull) {
   EXPECT_EQ(*currentValue(EvaluationContext{}, dim("orderYear")), *literal(Value()));
   EXPECT_EQ(*currentValue(constant({{"orderYear", Value(2024)}}), dim("prodName")), *literal(Value()));
}

TEST(CurrentValue, LatestTermWins) {
   auto ctx = constant({{"orderYear", Value(2024)}});
   ctx = applyModifier(ctx, SetDim{dim("orderYear"), literal(Value(2020))}, {});
   EXPECT_EQ(*currentValue(ctx, dim("orderYear")), *literal(Value(2020)));
}

TEST(CurrentValue, ReadsEqualityFromWhere) {
   auto ctx = applyModifier({}, WherePred{parseExpression("prodName = o.prodName AND revenue > 3")}, {});
   EXPECT_EQ(*currentValue(ctx, dim("prodName")), *column("o", "prodName"));
   EXPECT_EQ(*currentValue(ctx, dim("revenue")), *literal(Value()));
}

TEST(ToRowPredicate, TrueIsLiteral) {
   EXPECT_EQ(predicate(EvaluationContext{}), "TRUE");
}

TEST(ToRowPredicate, ExpressionDimensions) {
   // YEAR(orderDate) as a dimension expression, with the value one year back
   EvaluationContext ctx;
   ctx.terms.push_back(ContextTerm{DimEquals{dim("prodName"), column("o", "prodName"), std::nullopt}, TermOrigin::GroupKey});
   ctx.terms.push_back(ContextTerm{DimEquals{parseExpression("YEAR(orderDate)"), parseExpression("YEAR(o.orderDate) - 1"), std::nullopt}, TermOrigin::SetModifier});
   EXPECT_EQ(predicate(ctx, "r"), "r.prodName IS NOT DISTINCT FROM o.prodName AND YEAR(r.orderDate) IS NOT DISTINCT FROM YEAR(o.orderDate) - 1");
}

TEST(Describe, ShowsOrigins) {
   EXPECT_EQ(describe(EvaluationContext{}), "TRUE");
   EXPECT_EQ(describe(implicitContext(happySite())), "prodName = o.prodName [group key]");
}
