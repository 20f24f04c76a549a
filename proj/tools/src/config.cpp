#include "ladder/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace ladder::cli {

namespace {

// expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
// factor := ['-'] (number | "pi")
class NumberParser {
 public:
  explicit NumberParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail() const { throw ConfigError("not a number: '" + std::string(s_) + "'"); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      if (accept('*')) v *= factor();
      else if (accept('/')) v /= factor();
      else return v;
    }
  }

  double factor() {
    if (accept('-')) return -factor();
    skip();
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const auto* begin = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == begin) fail();
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void take_header(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "format_version") {
    cfg.format_version = static_cast<int>(parse_number(value));
    if (cfg.format_version != kFormatVersion) {
      throw ConfigError("unsupported format_version " + value + " (this build reads " + std::to_string(kFormatVersion) + ")");
    }
  } else {
    throw ConfigError("unknown top-level key '" + key + "'; parameters belong in a section");
  }
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw ConfigError("unsupported value type for '" + key + "'");
}

}  // namespace

double parse_number(std::string_view text) { return NumberParser(text).parse(); }

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") return parse_json(ss.str());
  return parse_ini(ss.str());
}

RunConfig RunConfig::parse_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      take_header(cfg, name, trim(node.data()));
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("config: nested sections are not supported ('" + name + "." + key + "')");
      cfg.values[name + "." + key] = trim(leaf.data());
    }
  }
  return cfg;
}

RunConfig RunConfig::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: JSON root must be an object");
  RunConfig cfg;
  for (const auto& [name, node] : j.items()) {
    if (!node.is_object()) {
      take_header(cfg, name, json_scalar(node, name));
      continue;
    }
    for (const auto& [key, leaf] : node.items()) {
      const std::string full = name + "." + key;
      if (leaf.is_array()) {
        std::string joined;
        for (const auto& x : leaf) joined += (joined.empty() ? "" : ",") + json_scalar(x, full);
        cfg.values[full] = joined;
      } else if (leaf.is_object()) {
        throw ConfigError("config: nested sections are not supported ('" + full + "')");
      } else {
        cfg.values[full] = json_scalar(leaf, full);
      }
    }
  }
  return cfg;
}

std::string RunConfig::to_ini() const {
  std::ostringstream os;
  if (!experiment.empty()) os << "experiment = " << experiment << "\n";
  os << "format_version = " << format_version << "\n";
  std::string current;
  for (const auto& [full, value] : values) {
    const auto dot = full.find('.');
    const std::string section = full.substr(0, dot);
    if (section != current) {
      os << "\n[" << section << "]\n";
      current = section;
    }
    os << full.substr(dot + 1) << " = " << value << "\n";
  }
  return os.str();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (!experiment.empty()) j["experiment"] = experiment;
  j["format_version"] = format_version;
  for (const auto& [full, value] : values) {
    const auto dot = full.find('.');
    j[full.substr(0, dot)][full.substr(dot + 1)] = value;
  }
  return j;
}

void RunConfig::resolve(const std::vector<ParamSpec>& schema) {
  std::set<std::string> known;
  for (const auto& p : schema) known.insert(p.key);
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values) {
    if (!known.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s) for '" + experiment + "':";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  for (const auto& p : schema) values.try_emplace(p.key, p.default_value);
}

const std::string& RunConfig::get_string(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  try {
    return parse_number(get_string(key));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

int RunConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::round(v)) throw ConfigError(key + ": expected an integer, got " + get_string(key));
  return static_cast<int>(v);
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto& s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got " + s);
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(parse_number(item));
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ladder::cli
