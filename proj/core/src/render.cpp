#include "measql/render.hpp"

#include <algorithm>
#include <cstdio>

namespace measql {

std::string formatValue(const Value& v, const RenderOptions& options) {
   if (!v.isDouble()) return v.toString();
   char buf[64];
   if (options.round) {
      std::snprintf(buf, sizeof buf, "%.*f", *options.round, v.asDouble());
      return buf;
   }
   std::snprintf(buf, sizeof buf, "%.4f", v.asDouble());
   std::string s = buf;
   if (s.find('.') != std::string::npos) {
      while (s.back() == '0') s.pop_back();
      if (s.back() == '.') s.pop_back();
   }
   if (s == "-0") s = "0";
   return s;
}

std::string renderTable(const Relation& rel, const RenderOptions& options) {
   size_t n = rel.columnNames.size();
   std::vector<size_t> width(n);
   std::vector<std::vector<std::string>> cells;
   for (size_t c = 0; c < n; ++c) width[c] = rel.columnNames[c].size();
   for (auto& row : rel.rows) {
      std::vector<std::string> line;
      for (size_t c = 0; c < n; ++c) {
         line.push_back(formatValue(row[c], options));
         width[c] = std::max(width[c], line.back().size());
      }
      cells.push_back(std::move(line));
   }
   std::string out;
   auto emit = [&](const std::vector<std::string>& line) {
      std::string text;
      for (size_t c = 0; c < n; ++c) {
         text += line[c];
         if (c + 1 < n) text += std::string(width[c] - line[c].size() + 1, ' ');
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out += text + "\n";
   };
   emit(rel.columnNames);
   std::vector<std::string> rule;
   for (size_t c = 0; c < n; ++c) rule.emplace_back(width[c], '=');
   emit(rule);
   for (auto& line : cells) emit(line);
   return out;
}

static std::string csvField(const std::string& s, bool isNull) {
   if (isNull) return "";
   if (!s.empty() && s.find_first_of(",\"\r\n") == std::string::npos) return s;
   std::string out = "\"";
   for (char c : s) {
      if (c == '"') out += '"';
      out += c;
   }
   return out + "\"";
}

std::string renderCsv(const Relation& rel, const RenderOptions& options) {
   std::string out;
   for (size_t c = 0; c < rel.columnNames.size(); ++c) out += (c ? "," : "") + csvField(rel.columnNames[c], false);
   out += "\n";
   for (auto& row : rel.rows) {
      for (size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csvField(formatValue(row[c], options), row[c].isNull());
      out += "\n";
   }
   return out;
}

}
