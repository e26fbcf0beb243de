#pragma once

#include "measql/catalog.hpp"
#include "measql/engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace measql {

/// One CSV record; an unquoted empty field is nullopt, "" is the empty string
using CsvRecord = std::vector<std::optional<std::string>>;

std::vector<CsvRecord> splitCsv(std::string_view text, std::string_view source = "<input>");

/// Parses CSV text with a header row into the schema's column order
Relation parseCsv(std::string_view text, const TableSchema& schema, std::string_view source = "<input>");
Relation loadCsv(const std::filesystem::path& path, const TableSchema& schema);

/// Loads <table>.csv for every base table that has a file in dir (name matched case-insensitively)
Database loadDatabase(const std::filesystem::path& dir, const Catalog& catalog);

}
