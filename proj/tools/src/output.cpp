#include "ladder/cli/output.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef LADDER_CODE_VERSION
#define LADDER_CODE_VERSION "unknown"
#endif

namespace ladder::cli {

namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

nlohmann::json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    // JSON has no inf/nan; keep them readable as strings.
    if (!std::isfinite(*d)) return format_number(*d);
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  return std::get<std::string>(cell);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error("Table::add_row: " + std::to_string(row.size()) + " cells for " +
                           std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
    os << "\n";
  }
  return os.str();
}

nlohmann::json Table::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row) r.push_back(cell_json(cell));
    rows.push_back(std::move(r));
  }
  return {{"format_version", kFormatVersion}, {"columns", columns_}, {"rows", std::move(rows)}};
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + name + "' (expected csv or json)");
}

OutputRecord write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                         OutputFormat format) {
  std::filesystem::create_directories(dir);
  const std::string name = stem + (format == OutputFormat::csv ? ".csv" : ".json");
  const std::string text = format == OutputFormat::csv ? table.to_csv() : table.to_json().dump(1) + "\n";
  write_text(dir / name, text);
  return {name, sha256_hex(text), table.rows().size()};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : outputs) outs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"rows", o.rows}});
  return {{"format_version", kFormatVersion},
          {"experiment", config.experiment},
          {"code_version", code_version},
          {"wall_seconds", wall_seconds},
          {"threads", threads},
          {"config", config.to_json()},
          {"outputs", std::move(outs)},
          {"summary", summary}};
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

nlohmann::json error_record(const std::string& kind, const std::string& message, const std::string& subcommand) {
  return {{"format_version", kFormatVersion},
          {"error", {{"kind", kind}, {"message", message}, {"subcommand", subcommand}}}};
}

std::string code_version() { return LADDER_CODE_VERSION; }

}  // namespace ladder::cli
