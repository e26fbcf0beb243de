#pragma once

#include "measql/ast.hpp"

#include <string_view>
#include <vector>

namespace measql {

/// Parses a script of ';'-separated statements. Throws SyntaxError.
std::vector<ast::Statement> parse(std::string_view text);
/// Parses exactly one query
ast::Query parseQuery(std::string_view text);
/// Parses exactly one expression
ast::ExprPtr parseExpression(std::string_view text);

/// Words that cannot be used as bare identifiers
bool isReservedWord(std::string_view word);
/// Words with a special meaning in some positions; printed quoted when used as identifiers
bool isContextualWord(std::string_view word);

}
