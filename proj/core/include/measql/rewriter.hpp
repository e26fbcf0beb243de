#pragma once

#include "measql/analyzer.hpp"
#include "measql/evalcontext.hpp"

#include <set>
#include <string>
#include <vector>

namespace measql {

/// Where a generated subquery came from
struct RewriteNote {
   /// Measure reference as written after normalization, e.g. "o.sumRevenue AT (VISIBLE)"
   std::string reference;
   std::string measure;
   std::string context;
   ast::QueryPtr subquery;
};

struct RewriteOutput {
   ast::QueryPtr query;
   std::vector<RewriteNote> notes;
};

/// AGGREGATE(m) as m AT (VISIBLE)
ast::AtExpr expandAggregateSugar(const ast::AggregateMeasureCall& call);

/// Replaces every measure reference with a correlated scalar subquery
RewriteOutput expand(const ResolvedQuery& resolved);

/// hint if unused, else hint0, hint1, ...
std::string freshAlias(const std::string& hint, const std::set<std::string, CaseInsensitiveLess>& used);

}
