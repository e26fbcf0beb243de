#pragma once

#include "measql/engine.hpp"

#include <optional>
#include <string>

namespace measql {

struct RenderOptions {
   /// Fixed number of decimals for doubles; default prints up to 4, trimmed
   std::optional<int> round;
};

std::string formatValue(const Value& v, const RenderOptions& options = {});
/// Header, '=' underline and left-aligned columns; NULL renders empty
std::string renderTable(const Relation& rel, const RenderOptions& options = {});
std::string renderCsv(const Relation& rel, const RenderOptions& options = {});

}
