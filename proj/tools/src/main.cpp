// ladder: runs one experiment from a config file and writes its tables and a
// manifest into an output directory.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ladder/cli/config.hpp"
#include "ladder/cli/experiments.hpp"
#include "ladder/cli/output.hpp"

namespace {

using namespace ladder::cli;

constexpr const char* kOutDirVariable = "LADDER_OUT_DIR";

struct Options {
  std::string config;
  std::string out;
  int threads = 1;
  std::optional<double> threshold;
  std::optional<double> tolerance;
  std::string format = "csv";
  std::vector<std::string> sets;
  bool print_config = false;
};

int fail(const std::string& kind, const std::string& message, const std::string& subcommand, int code) {
  std::cerr << error_record(kind, message, subcommand).dump() << "\n";
  return code;
}

RunConfig assemble(const Experiment& exp, const Options& opt) {
  RunConfig cfg;
  if (!opt.config.empty()) cfg = RunConfig::parse_file(opt.config);
  if (!cfg.experiment.empty() && cfg.experiment != exp.name) {
    throw ConfigError("config is for '" + cfg.experiment + "', not '" + exp.name + "'");
  }
  cfg.experiment = exp.name;
  for (const auto& kv : opt.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.resolve(exp.schema);
  if (opt.threshold && !exp.uses_threshold) throw ConfigError("--threshold does not apply to " + exp.name);
  if (opt.tolerance && !exp.uses_tolerance) {
    throw ConfigError("--tolerance does not apply to " + exp.name + (exp.name == "selftest" ? " (tolerances are pinned)" : ""));
  }
  if (opt.threads < 1) throw ConfigError("--threads must be at least 1");
  return cfg;
}

std::filesystem::path output_dir(const Options& opt, const std::string& name) {
  if (!opt.out.empty()) return opt.out;
  if (const char* env = std::getenv(kOutDirVariable); env && *env) return std::filesystem::path(env) / name;
  return std::filesystem::path("out") / name;
}

int run(const Experiment& exp, const Options& opt) {
  RunConfig cfg;
  OutputFormat format{};
  try {
    cfg = assemble(exp, opt);
    format = parse_format(opt.format);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), exp.name, 2);
  }
  if (opt.print_config) {
    std::cout << cfg.to_ini();
    return 0;
  }

  const auto dir = output_dir(opt, exp.name);
  RunContext ctx{opt.threads, opt.threshold, opt.tolerance};
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput result;
  try {
    result = exp.run(cfg, ctx);
  } catch (const InfeasibleError& e) {
    return fail("infeasible", e.what(), exp.name, 3);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), exp.name, 2);
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what(), exp.name, 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), exp.name, 1);
  }

  RunManifest manifest;
  manifest.config = cfg;
  manifest.code_version = code_version();
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.threads = opt.threads;
  manifest.summary = result.summary;
  manifest.summary["ok"] = result.ok;
  if (!result.ok) manifest.summary["failure"] = result.failure;
  try {
    for (const auto& [stem, table] : result.tables) {
      manifest.outputs.push_back(write_table(table, dir, stem, format));
      spdlog::info("wrote {} ({} rows)", (dir / manifest.outputs.back().file).string(), table.rows().size());
    }
    write_manifest(manifest, dir);
  } catch (const std::exception& e) {
    return fail("io", e.what(), exp.name, 1);
  }
  std::cout << result.summary.dump(2) << "\n";
  if (!result.ok) return fail("check_failed", result.failure, exp.name, 1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("ladder"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Driven two-leg ladder: propagation, RG scans, exact diagonalization and Kitaev-chain checks"};
  app.require_subcommand(1);
  Options opt;
  std::vector<std::pair<CLI::App*, const Experiment*>> subs;
  for (const auto& exp : experiments()) {
    auto* sub = app.add_subcommand(exp.name, exp.help);
    sub->add_option("--config", opt.config, "INI or JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, std::string("output directory (default: $") + kOutDirVariable + "/<name> or out/<name>)");
    sub->add_option("--threads", opt.threads, "worker threads")->capture_default_str();
    sub->add_option("--threshold", opt.threshold, "strong-coupling threshold of the RG flow");
    sub->add_option("--tolerance", opt.tolerance, "tolerance of the experiment's built-in check");
    sub->add_option("--format", opt.format, "csv or json")->capture_default_str();
    sub->add_option("--set", opt.sets, "override one parameter: section.key=value")->take_all();
    sub->add_flag("--print-config", opt.print_config, "print the resolved configuration and exit");
    std::string keys = "parameters:";
    for (const auto& p : exp.schema) keys += "\n  " + p.key + " = " + p.default_value + (p.help.empty() ? "" : "  (" + p.help + ")");
    sub->footer(keys);
    subs.emplace_back(sub, &exp);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string name;
    for (const auto& [sub, exp] : subs) {
      if (sub->parsed()) name = exp->name;
    }
    return fail("usage", e.what(), name, 2);
  }

  for (const auto& [sub, exp] : subs) {
    if (sub->parsed()) return run(*exp, opt);
  }
  return fail("usage", "no subcommand", "", 2);
}
