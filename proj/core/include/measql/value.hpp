#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace measql {

/// Column types accepted by the DDL.
enum class ScalarType { Varchar, Integer, Double, Date, Boolean };

std::string_view toString(ScalarType type);
/// Case-insensitive lookup of a DDL type name
std::optional<ScalarType> scalarTypeFromName(std::string_view name);
bool isNumeric(ScalarType type);

/// A calendar date stored as days since 1970-01-01.
struct Date {
   int32_t days = 0;

   auto operator<=>(const Date&) const = default;

   static Date fromYmd(int year, unsigned month, unsigned day);
   /// Accepts YYYY-MM-DD and YYYY/MM/DD
   static std::optional<Date> parse(std::string_view text);
   /// ISO form YYYY-MM-DD
   std::string toString() const;
   int year() const;
};

struct Null {
   bool operator==(const Null&) const = default;
};

/// A nullable scalar. Equality is structural; SQL comparison semantics live in the engine.
class Value {
   public:
   Value() = default;
   Value(Null) {}
   Value(std::string s) : data_(std::move(s)) {}
   Value(const char* s) : data_(std::string(s)) {}
   Value(int64_t v) : data_(v) {}
   Value(int v) : data_(int64_t{v}) {}
   Value(double v) : data_(v) {}
   Value(Date d) : data_(d) {}
   Value(bool b) : data_(b) {}

   bool isNull() const { return std::holds_alternative<Null>(data_); }
   /// Type of a non-null value
   ScalarType type() const;

   bool isString() const { return std::holds_alternative<std::string>(data_); }
   bool isInteger() const { return std::holds_alternative<int64_t>(data_); }
   bool isDouble() const { return std::holds_alternative<double>(data_); }
   bool isDate() const { return std::holds_alternative<Date>(data_); }
   bool isBool() const { return std::holds_alternative<bool>(data_); }
   bool isNumber() const { return isInteger() || isDouble(); }

   const std::string& asString() const { return std::get<std::string>(data_); }
   int64_t asInteger() const { return std::get<int64_t>(data_); }
   double asDouble() const { return std::get<double>(data_); }
   Date asDate() const { return std::get<Date>(data_); }
   bool asBool() const { return std::get<bool>(data_); }
   /// Numeric value widened to double
   double toDouble() const { return isInteger() ? static_cast<double>(asInteger()) : asDouble(); }

   /// Display form: NULL is empty, doubles in shortest round-trip form
   std::string toString() const;

   bool operator==(const Value&) const = default;

   private:
   std::variant<Null, std::string, int64_t, double, Date, bool> data_;
};

/// Shortest text that parses back to the same double
std::string formatDouble(double v);

/// SQL ordering of two non-null values of compatible type; nullopt when incomparable.
std::optional<std::partial_ordering> compareValues(const Value& a, const Value& b);
/// IS NOT DISTINCT FROM: total, NULL equals NULL, integers compare equal to equal doubles
bool notDistinct(const Value& a, const Value& b);
/// Total order used for sorting: NULL last, then by compareValues
bool sortsBefore(const Value& a, const Value& b);

}
