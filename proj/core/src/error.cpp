#include "measql/error.hpp"

namespace measql {

std::string_view errorCodeName(ErrorCode code) {
   switch (code) {
      case ErrorCode::Syntax: return "SyntaxError";
      case ErrorCode::DuplicateName: return "DuplicateName";
      case ErrorCode::UnknownTable: return "UnknownTable";
      case ErrorCode::UnknownColumn: return "UnknownColumn";
      case ErrorCode::AmbiguousColumn: return "AmbiguousColumn";
      case ErrorCode::NotAMeasure: return "NotAMeasure";
      case ErrorCode::TypeMismatch: return "TypeMismatch";
      case ErrorCode::MeasureMisuse: return "MeasureMisuse";
      case ErrorCode::InvalidCurrent: return "InvalidCurrent";
      case ErrorCode::NonDimensionModifier: return "NonDimensionModifier";
      case ErrorCode::NonAggregatableMeasure: return "NonAggregatableMeasure";
      case ErrorCode::MeasureCycle: return "MeasureCycle";
      case ErrorCode::Analysis: return "AnalysisError";
      case ErrorCode::ScalarSubqueryCardinality: return "ScalarSubqueryCardinality";
      case ErrorCode::DivisionByZero: return "DivisionByZero";
      case ErrorCode::TypeError: return "TypeError";
      case ErrorCode::MissingData: return "MissingData";
      case ErrorCode::CsvShape: return "CsvShapeError";
      case ErrorCode::CsvParse: return "CsvParseError";
      case ErrorCode::Io: return "IoError";
   }
   return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
   : std::runtime_error(std::string(errorCodeName(code)) + ": " + message), code_(code) {}

bool Error::isCompileError() const noexcept {
   switch (code_) {
      case ErrorCode::Syntax:
      case ErrorCode::DuplicateName:
      case ErrorCode::UnknownTable:
      case ErrorCode::UnknownColumn:
      case ErrorCode::AmbiguousColumn:
      case ErrorCode::NotAMeasure:
      case ErrorCode::TypeMismatch:
      case ErrorCode::MeasureMisuse:
      case ErrorCode::InvalidCurrent:
      case ErrorCode::NonDimensionModifier:
      case ErrorCode::NonAggregatableMeasure:
      case ErrorCode::MeasureCycle:
      case ErrorCode::Analysis: return true;
      default: return false;
   }
}

bool Error::isIoError() const noexcept {
   return code_ == ErrorCode::Io || code_ == ErrorCode::CsvShape || code_ == ErrorCode::CsvParse || code_ == ErrorCode::MissingData;
}

static std::string describeSyntaxError(unsigned line, unsigned column, const std::string& found, const std::vector<std::string>& expected) {
   std::string msg = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": unexpected " + found;
   if (!expected.empty()) {
      msg += ", expected ";
      for (size_t i = 0; i < expected.size(); ++i) {
         if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
         msg += expected[i];
      }
   }
   return msg;
}

SyntaxError::SyntaxError(unsigned line, unsigned column, std::string found, std::vector<std::string> expected)
   : Error(ErrorCode::Syntax, describeSyntaxError(line, column, found, expected)), line_(line), column_(column), found_(std::move(found)), expected_(std::move(expected)) {}

}
