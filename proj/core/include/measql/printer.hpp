#pragma once

#include "measql/ast.hpp"

#include <string>
#include <vector>

namespace measql {

/// SQL text for the node. Parsing the output yields a structurally equal AST;
/// parentheses are emitted wherever the operator precedence table would otherwise regroup.
std::string print(const ast::Expr& expr);
std::string print(const ast::Query& query);
std::string print(const ast::Statement& statement);
/// Statements separated by ";" lines
std::string printScript(const std::vector<ast::Statement>& statements);
/// Identifier, quoted when it would not re-lex as itself
std::string printIdentifier(std::string_view name);

}
