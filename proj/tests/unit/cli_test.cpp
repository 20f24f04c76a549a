#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "ladder/cli/config.hpp"
#include "ladder/cli/experiments.hpp"
#include "ladder/cli/output.hpp"

using namespace ladder::cli;

TEST(Config, NumberExpressions) {
  EXPECT_DOUBLE_EQ(parse_number("0.25"), 0.25);
  EXPECT_DOUBLE_EQ(parse_number("1/3"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_number("pi/2 + 0.1"), 3.14159265358979323846 / 2 + 0.1);
  EXPECT_DOUBLE_EQ(parse_number("-1.5"), -1.5);
  EXPECT_DOUBLE_EQ(parse_number("2*-3"), -6.0);
  EXPECT_THROW(parse_number("abc"), ConfigError);
  EXPECT_THROW(parse_number("1/"), ConfigError);
}

TEST(Config, FormatNumberRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, i % 20 - 10);
    EXPECT_EQ(parse_number(format_number(x)), x);
  }
}

TEST(Config, IniAndJsonRoundTrip) {
  RunConfig cfg;
  cfg.experiment = "rabi";
  cfg.set("model.U0", "-0.7");
  cfg.set("drive.alpha", "1/3");
  cfg.set("rg.list", "0.1,0.2");
  EXPECT_EQ(RunConfig::parse_ini(cfg.to_ini()), cfg);
  EXPECT_EQ(RunConfig::parse_json(cfg.to_json().dump()), cfg);

  const auto j = RunConfig::parse_json(R"({"experiment": "rgscan", "format_version": 1,
      "rg": {"nu": 0.25, "U0_points": 3, "flag": true, "grid": [0.5, 1]}})");
  EXPECT_EQ(j.get_string("rg.nu"), "0.25");
  EXPECT_EQ(j.get_int("rg.U0_points"), 3);
  EXPECT_TRUE(j.get_bool("rg.flag"));
  EXPECT_EQ(j.get_list("rg.grid"), (std::vector<double>{0.5, 1.0}));
}

TEST(Config, RejectsUnknownKeysAndVersions) {
  const std::vector<ParamSpec> schema = {{"model.U0", "-0.7", ""}, {"model.L", "2", ""}};
  auto cfg = RunConfig::parse_ini("experiment = rabi\n[model]\nU0 = -1\nUO = 3\n");
  EXPECT_THROW(cfg.resolve(schema), ConfigError);
  cfg = RunConfig::parse_ini("[model]\nU0 = -1\n");
  cfg.resolve(schema);
  EXPECT_EQ(cfg.get_double("model.U0"), -1.0);
  EXPECT_EQ(cfg.get_int("model.L"), 2);
  EXPECT_THROW(RunConfig::parse_ini("format_version = 99\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_ini("stray = 1\n"), ConfigError);
  EXPECT_THROW(cfg.get_double("model.missing"), ConfigError);
}

TEST(Output, CsvHasOneHeaderAndFullPrecision) {
  Table t({"x", "n", "label"});
  t.add_row({0.1, 3LL, std::string("a,b")});
  EXPECT_EQ(t.to_csv(), "x,n,label\n0.10000000000000001,3,\"a,b\"\n");
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
  const auto j = t.to_json();
  EXPECT_EQ(j["format_version"], kFormatVersion);
  EXPECT_EQ(j["rows"][0][1], 3);
}

TEST(Output, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Output, ErrorRecordShape) {
  const auto e = error_record("config", "bad key", "rabi");
  EXPECT_EQ(e["format_version"], kFormatVersion);
  EXPECT_EQ(e["error"]["kind"], "config");
  EXPECT_EQ(e["error"]["subcommand"], "rabi");
}

TEST(Registry, AllSubcommandsPresent) {
  for (const char* name : {"rabi", "parity", "micromotion", "rgscan", "gaps", "entspec", "correlations", "impure-pulse",
                           "continuous-drive", "kitaev-validate", "selftest"}) {
    EXPECT_NE(find_experiment(name), nullptr) << name;
  }
  EXPECT_EQ(find_experiment("nope"), nullptr);
  EXPECT_EQ(ladder_dimension(8, 4), 1820.0);
}

namespace {

ExperimentOutput run_named(const std::string& name, std::map<std::string, std::string> overrides, RunContext ctx = {}) {
  const auto* exp = find_experiment(name);
  RunConfig cfg;
  cfg.experiment = name;
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  cfg.resolve(exp->schema);
  return exp->run(cfg, ctx);
}

}  // namespace

TEST(Experiments, RabiDefaultPassesItsCheck) {
  const auto out = run_named("rabi", {});
  EXPECT_TRUE(out.ok) << out.failure;
  EXPECT_LT(out.summary["relative_error"].get<double>(), 0.01);
  const auto& table = out.tables.front().second;
  EXPECT_EQ(table.columns().front(), "L");
  EXPECT_EQ(table.rows().size(), 201u);
}

TEST(Experiments, RgscanIsDeterministicAcrossThreadCounts) {
  const std::map<std::string, std::string> grid = {{"rg.U0_points", "3"}, {"rg.alpha_points", "6"}};
  const auto a = run_named("rgscan", grid, {1, {}, {}});
  const auto b = run_named("rgscan", grid, {3, {}, {}});
  EXPECT_EQ(a.tables[0].second.to_csv(), b.tables[0].second.to_csv());
  EXPECT_EQ(a.tables[1].second.to_csv(), b.tables[1].second.to_csv());
  const auto c = run_named("rgscan", grid, {1, 4.0, {}});
  EXPECT_NE(a.tables[0].second.to_csv(), c.tables[0].second.to_csv());
}

TEST(Experiments, InfeasibleSizesAreRejected) {
  try {
    run_named("gaps", {{"model.L", "20"}, {"model.N", "10"}});
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("estimated sector dimension"), std::string::npos);
  }
  EXPECT_THROW(run_named("parity", {{"model.L", "8"}, {"model.N", "8"}}), InfeasibleError);
}

TEST(Experiments, KitaevValidateDefaultPasses) {
  const auto out = run_named("kitaev-validate", {});
  EXPECT_TRUE(out.ok) << out.failure;
}

TEST(Experiments, BadValuesAreConfigErrors) {
  EXPECT_THROW(run_named("rabi", {{"drive.scheme", "sawtooth"}}), ConfigError);
  EXPECT_THROW(run_named("rabi", {{"state.initial", "0,0"}}), ConfigError);
  EXPECT_THROW(run_named("rabi", {{"state.initial", "0"}}), ConfigError);
}
