#include "measql/value.hpp"
#include "measql/names.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace measql {

std::string_view toString(ScalarType type) {
   switch (type) {
      case ScalarType::Varchar: return "VARCHAR";
      case ScalarType::Integer: return "INTEGER";
      case ScalarType::Double: return "DOUBLE";
      case ScalarType::Date: return "DATE";
      case ScalarType::Boolean: return "BOOLEAN";
   }
   return "?";
}

std::optional<ScalarType> scalarTypeFromName(std::string_view name) {
   for (auto t : {ScalarType::Varchar, ScalarType::Integer, ScalarType::Double, ScalarType::Date, ScalarType::Boolean})
      if (iequals(name, toString(t))) return t;
   return std::nullopt;
}

bool isNumeric(ScalarType type) {
   return type == ScalarType::Integer || type == ScalarType::Double;
}

Date Date::fromYmd(int year, unsigned month, unsigned day) {
   std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
   return Date{static_cast<int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::optional<Date> Date::parse(std::string_view text) {
   if (text.size() != 10) return std::nullopt;
   char sep = text[4];
   if ((sep != '-' && sep != '/') || text[7] != sep) return std::nullopt;
   int y = 0;
   unsigned m = 0, d = 0;
   auto num = [](std::string_view s, auto& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      return ec == std::errc() && p == s.data() + s.size();
   };
   if (!num(text.substr(0, 4), y) || !num(text.substr(5, 2), m) || !num(text.substr(8, 2), d)) return std::nullopt;
   std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
   if (!ymd.ok()) return std::nullopt;
   return Date{static_cast<int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::string Date::toString() const {
   std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
   char buf[32];
   std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
   return buf;
}

int Date::year() const {
   std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
   return static_cast<int>(ymd.year());
}

ScalarType Value::type() const {
   switch (data_.index()) {
      case 1: return ScalarType::Varchar;
      case 2: return ScalarType::Integer;
      case 3: return ScalarType::Double;
      case 4: return ScalarType::Date;
      case 5: return ScalarType::Boolean;
      default: return ScalarType::Varchar;
   }
}

std::string formatDouble(double v) {
   char buf[64];
   auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
   return std::string(buf, p);
}

std::string Value::toString() const {
   if (isNull()) return "";
   if (isString()) return asString();
   if (isInteger()) return std::to_string(asInteger());
   if (isDouble()) return formatDouble(asDouble());
   if (isDate()) return asDate().toString();
   return asBool() ? "TRUE" : "FALSE";
}

std::optional<std::partial_ordering> compareValues(const Value& a, const Value& b) {
   if (a.isNull() || b.isNull()) return std::nullopt;
   if (a.isInteger() && b.isInteger()) return a.asInteger() <=> b.asInteger();
   if (a.isNumber() && b.isNumber()) return a.toDouble() <=> b.toDouble();
   if (a.isString() && b.isString()) return a.asString().compare(b.asString()) <=> 0;
   if (a.isDate() && b.isDate()) return a.asDate() <=> b.asDate();
   if (a.isBool() && b.isBool()) return a.asBool() <=> b.asBool();
   return std::nullopt;
}

bool notDistinct(const Value& a, const Value& b) {
   if (a.isNull() || b.isNull()) return a.isNull() && b.isNull();
   auto c = compareValues(a, b);
   return c && *c == 0;
}

bool sortsBefore(const Value& a, const Value& b) {
   if (a.isNull()) return false;
   if (b.isNull()) return true;
   auto c = compareValues(a, b);
   if (!c) return a.type() < b.type();
   return *c < 0;
}

}
