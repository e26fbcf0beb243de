#pragma once

#include "measql/ast.hpp"
#include "measql/engine.hpp"
#include "measql/error.hpp"
#include "measql/session.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace measql::testing {

std::filesystem::path dataDir();
std::filesystem::path dataFile(const std::string& name);
std::string readData(const std::string& name);

/// Schema plus the five orders and three customers used throughout the tests
Session sampleSession();

/// Renames every table alias to a0, a1, ... in traversal order, so two queries that
/// differ only in alias choice compare equal.
ast::Query canonicalAliases(const ast::Query& q);

bool valuesClose(const Value& a, const Value& b, double relTol);
/// Same column count and rows; numbers compared with a relative tolerance
bool relationsClose(const Relation& a, const Relation& b, double relTol = 1e-9, bool ignoreOrder = false);

size_t columnIndex(const Relation& r, const std::string& name);
std::string show(const Relation& r);

}

/// Runs f and returns the code of the measql::Error it throws, if any
#define MEASQL_ERROR_CODE(expr)                                      \
   ([&]() -> std::optional<::measql::ErrorCode> {                    \
      try {                                                          \
         (void)(expr);                                               \
      } catch (const ::measql::Error& e) {                           \
         return e.code();                                            \
      }                                                              \
      return std::nullopt;                                           \
   }())
