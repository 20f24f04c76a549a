#pragma once

// Tabular results, their CSV/JSON serialization and the per-run manifest.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ladder/cli/config.hpp"

namespace ladder::cli {

using Cell = std::variant<double, long long, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  // Single header row, doubles at 17 significant digits.
  std::string to_csv() const;
  // {"format_version", "columns", "rows"}.
  nlohmann::json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

struct OutputRecord {
  std::string file;
  std::string sha256;
  std::size_t rows = 0;
};

// Writes `table` as <stem>.csv or <stem>.json inside `dir`.
OutputRecord write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                         OutputFormat format);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  RunConfig config;
  std::string code_version;
  double wall_seconds = 0.0;
  int threads = 1;
  std::vector<OutputRecord> outputs;
  nlohmann::json summary = nlohmann::json::object();

  nlohmann::json to_json() const;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

// {"format_version", "error": {"kind", "message", "subcommand"}}
nlohmann::json error_record(const std::string& kind, const std::string& message, const std::string& subcommand);

std::string code_version();

}  // namespace ladder::cli
