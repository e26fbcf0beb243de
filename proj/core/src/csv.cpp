#include "measql/csv.hpp"

#include "measql/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace measql {

std::vector<CsvRecord> splitCsv(std::string_view text, std::string_view source) {
   std::vector<CsvRecord> records;
   CsvRecord record;
   std::string field;
   bool quoted = false;
   bool fieldStarted = false;
   size_t line = 1;
   auto endField = [&] {
      if (quoted || !field.empty())
         record.emplace_back(field);
      else
         record.emplace_back(std::nullopt);
      field.clear();
      quoted = false;
      fieldStarted = false;
   };
   auto endRecord = [&] {
      endField();
      if (!(record.size() == 1 && !record[0])) records.push_back(std::move(record));
      record.clear();
   };
   size_t i = 0;
   while (i < text.size()) {
      char c = text[i];
      if (c == '"' && !fieldStarted) {
         quoted = true;
         fieldStarted = true;
         ++i;
         while (true) {
            if (i >= text.size()) throw Error(ErrorCode::CsvParse, std::string(source) + ": line " + std::to_string(line) + ": unterminated quoted field");
            if (text[i] == '"') {
               if (i + 1 < text.size() && text[i + 1] == '"') {
                  field += '"';
                  i += 2;
                  continue;
               }
               ++i;
               break;
            }
            if (text[i] == '\n') ++line;
            field += text[i++];
         }
         if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
            throw Error(ErrorCode::CsvParse, std::string(source) + ": line " + std::to_string(line) + ": text after closing quote");
         continue;
      }
      if (c == ',') {
         endField();
      } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
         ++i;
         endRecord();
         ++line;
      } else if (c == '\n') {
         endRecord();
         ++line;
      } else {
         field += c;
         fieldStarted = true;
      }
      ++i;
   }
   if (fieldStarted || !record.empty()) endRecord();
   return records;
}

namespace {

Value parseField(const std::string& text, ScalarType type) {
   switch (type) {
      case ScalarType::Varchar: return Value(text);
      case ScalarType::Integer: {
         int64_t v;
         auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
         if (ec != std::errc() || p != text.data() + text.size()) break;
         return Value(v);
      }
      case ScalarType::Double: {
         double v;
         auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
         if (ec != std::errc() || p != text.data() + text.size()) break;
         return Value(v);
      }
      case ScalarType::Date:
         if (auto d = Date::parse(text)) return Value(*d);
         break;
      case ScalarType::Boolean:
         if (iequals(text, "true")) return Value(true);
         if (iequals(text, "false")) return Value(false);
         break;
   }
   throw std::invalid_argument(text);
}

}

Relation parseCsv(std::string_view text, const TableSchema& schema, std::string_view source) {
   auto records = splitCsv(text, source);
   std::string where(source);
   if (records.empty()) throw Error(ErrorCode::CsvShape, where + ": missing header row");
   auto& header = records[0];
   if (header.size() != schema.columns.size()) throw Error(ErrorCode::CsvShape, where + ": header has " + std::to_string(header.size()) + " columns, table " + schema.name + " has " + std::to_string(schema.columns.size()));
   // position of each schema column in the file
   std::vector<size_t> position(schema.columns.size(), header.size());
   for (size_t f = 0; f < header.size(); ++f) {
      std::string name = header[f].value_or("");
      bool found = false;
      for (size_t c = 0; c < schema.columns.size(); ++c)
         if (iequals(schema.columns[c].name, name)) {
            if (position[c] != header.size()) throw Error(ErrorCode::CsvShape, where + ": column " + name + " appears twice in the header");
            position[c] = f;
            found = true;
         }
      if (!found) throw Error(ErrorCode::CsvShape, where + ": header column " + name + " is not a column of " + schema.name);
   }
   Relation rel;
   for (auto& c : schema.columns) rel.columnNames.push_back(c.name);
   for (size_t r = 1; r < records.size(); ++r) {
      auto& rec = records[r];
      if (rec.size() != header.size()) throw Error(ErrorCode::CsvShape, where + ": row " + std::to_string(r) + " has " + std::to_string(rec.size()) + " fields, expected " + std::to_string(header.size()));
      Row row;
      for (size_t c = 0; c < schema.columns.size(); ++c) {
         auto& field = rec[position[c]];
         if (!field) {
            row.emplace_back();
            continue;
         }
         try {
            row.push_back(parseField(*field, schema.columns[c].type));
         } catch (const std::invalid_argument&) {
            throw Error(ErrorCode::CsvParse, where + ": row " + std::to_string(r) + ", column " + schema.columns[c].name + ": cannot read '" + *field + "' as " + std::string(toString(schema.columns[c].type)));
         }
      }
      rel.rows.push_back(std::move(row));
   }
   return rel;
}

Relation loadCsv(const std::filesystem::path& path, const TableSchema& schema) {
   std::ifstream in(path, std::ios::binary);
   if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
   std::stringstream buffer;
   buffer << in.rdbuf();
   return parseCsv(buffer.str(), schema, path.filename().string());
}

Database loadDatabase(const std::filesystem::path& dir, const Catalog& catalog) {
   std::error_code ec;
   if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::Io, "data directory " + dir.string() + " does not exist");
   Database db;
   for (auto table : catalog.baseTables()) {
      for (auto& entry : std::filesystem::directory_iterator(dir)) {
         auto name = entry.path().filename().string();
         if (entry.is_regular_file() && iequals(name, table->name + ".csv")) {
            db.add(table->name, loadCsv(entry.path(), *table));
            break;
         }
      }
   }
   return db;
}

}
