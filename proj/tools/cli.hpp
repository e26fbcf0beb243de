#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace measql::cli {

enum class OutputFormat { Table, Csv };

struct RunConfig {
   std::filesystem::path schemaPath;
   std::optional<std::filesystem::path> dataDir;
   OutputFormat format = OutputFormat::Table;
   std::optional<int> round;
};

// Exit codes
constexpr int kOk = 0;
constexpr int kCompileError = 1;
constexpr int kIoError = 2;
constexpr int kRuntimeError = 3;

int cmdTranspile(const std::filesystem::path& queryPath, const std::filesystem::path& schemaPath, std::ostream& out, std::ostream& err);
int cmdRun(const std::filesystem::path& queryPath, const RunConfig& config, std::ostream& out, std::ostream& err);
int cmdRepl(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

/// Parses arguments and dispatches to a subcommand
int main(int argc, char** argv, std::istream& in, std::ostream& out, std::ostream& err);

}
