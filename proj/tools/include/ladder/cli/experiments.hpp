#pragma once

// Subcommands of the `ladder` runner. Each one declares its parameter schema
// and turns a resolved config into tables plus a JSON summary.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ladder/cli/config.hpp"
#include "ladder/cli/output.hpp"

namespace ladder::cli {

// A requested system is too large for the method that would handle it.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunContext {
  int threads = 1;
  std::optional<double> threshold;  // --threshold
  std::optional<double> tolerance;  // --tolerance
};

struct ExperimentOutput {
  std::vector<std::pair<std::string, Table>> tables;
  nlohmann::json summary = nlohmann::json::object();
  // False when a built-in check of the experiment failed; the run still
  // writes its outputs but exits nonzero.
  bool ok = true;
  std::string failure;
};

struct Experiment {
  std::string name;
  std::string help;
  std::vector<ParamSpec> schema;
  std::function<ExperimentOutput(const RunConfig&, const RunContext&)> run;
  bool uses_threshold = false;
  bool uses_tolerance = true;
};

const std::vector<Experiment>& experiments();
const Experiment* find_experiment(std::string_view name);

// C(2L, N): number of ladder states with N particles on L rungs.
double ladder_dimension(int L, int N);

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

// Free-fermion validation of the Kitaev chain: Majorana splitting at the sweet
// spot, entanglement doubling, gap closing at |mu| = 2t, and agreement between
// the BdG route and many-body exact diagonalization.
struct KitaevSuite {
  double t = 1.0;
  int L_split = 30;
  int L_ed = 8;
  double mu_ed = 0.5;
  double Delta_ed = 0.7;
  int scan_points = 81;
  double scan_mu_max = 4.0;
};

struct KitaevSuiteResult {
  std::vector<Check> checks;
  Table gap_scan{{"t", "Delta", "L", "mu", "bulk_gap", "phase", "lowest_energy_open"}};
};

KitaevSuiteResult run_kitaev_suite(const KitaevSuite& suite);

// Sector-size ceilings per method.
inline constexpr double kBlockPropagationLimit = 1024;  // propagating every basis state
inline constexpr double kStatePropagationLimit = 2e5;   // one state, Krylov steps
inline constexpr double kDiagonalizationLimit = 2e5;    // Lanczos ground states

}  // namespace ladder::cli
