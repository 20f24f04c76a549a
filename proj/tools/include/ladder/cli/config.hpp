#pragma once

// Run configuration: a flat set of "section.key" values read from INI or JSON,
// checked against the schema of the chosen experiment.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ladder::cli {

inline constexpr int kFormatVersion = 1;

struct ParamSpec {
  std::string key;  // "section.name"
  std::string default_value;
  std::string help;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunConfig {
 public:
  std::string experiment;
  int format_version = kFormatVersion;
  std::map<std::string, std::string> values;

  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_ini(const std::string& text);
  static RunConfig parse_json(const std::string& text);

  std::string to_ini() const;
  nlohmann::json to_json() const;

  // Rejects keys the schema does not know and fills the missing ones with
  // their defaults, so the resolved config spells out every parameter used.
  void resolve(const std::vector<ParamSpec>& schema);

  void set(const std::string& key, const std::string& value) { values[key] = value; }
  bool has(const std::string& key) const { return values.count(key) > 0; }

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Numbers with the conveniences config files need: "0.25", "1/3", "pi/2",
// "pi/2 + 0.1", "-1.5".
double parse_number(std::string_view text);

// 17 significant digits, enough to read back the identical double.
std::string format_number(double value);

}  // namespace ladder::cli
