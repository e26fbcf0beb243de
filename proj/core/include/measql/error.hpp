#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace measql {

enum class ErrorCode {
   Syntax,
   DuplicateName,
   UnknownTable,
   UnknownColumn,
   AmbiguousColumn,
   NotAMeasure,
   TypeMismatch,
   MeasureMisuse,
   InvalidCurrent,
   NonDimensionModifier,
   NonAggregatableMeasure,
   MeasureCycle,
   Analysis,
   ScalarSubqueryCardinality,
   DivisionByZero,
   TypeError,
   MissingData,
   CsvShape,
   CsvParse,
   Io,
};

std::string_view errorCodeName(ErrorCode code);

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
   Error(ErrorCode code, const std::string& message);

   ErrorCode code() const noexcept { return code_; }

   /// True for errors raised while parsing or analyzing a statement
   bool isCompileError() const noexcept;
   /// True for errors raised by reading files
   bool isIoError() const noexcept;

   private:
   ErrorCode code_;
};

/// A parse failure with its position in the source text.
class SyntaxError : public Error {
   public:
   SyntaxError(unsigned line, unsigned column, std::string found, std::vector<std::string> expected);

   unsigned line() const noexcept { return line_; }
   unsigned column() const noexcept { return column_; }
   const std::string& found() const noexcept { return found_; }
   const std::vector<std::string>& expected() const noexcept { return expected_; }

   private:
   unsigned line_;
   unsigned column_;
   std::string found_;
   std::vector<std::string> expected_;
};

}
