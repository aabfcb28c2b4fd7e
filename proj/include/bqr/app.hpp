#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bqr/gibbs.hpp"
#include "bqr/simulation.hpp"

namespace bqr::app {

// ---- configuration --------------------------------------------------------

struct FitConfig {
  std::filesystem::path input;
  std::string outcome;
  std::vector<std::string> covariates;
  std::vector<std::string> continuous;  // subset of covariates to standardize
  std::vector<double> quantiles = {0.5};
  ModelKind model = ModelKind::kMisclass;

  // beta ~ N(beta0, B0): beta0 is a common mean unless beta0_vec is given;
  // B0 = b0_scale * I unless b0_diag is given.
  double beta0 = 0.0;
  Vec beta0_vec;
  double b0_scale = 10.0;
  Vec b0_diag;
  std::optional<BetaPrior> delta01;
  std::optional<BetaPrior> delta10;

  std::size_t chains = 2;
  long iterations = 10000;  // per chain, burn-in included
  long burn_in = 5000;
  long thin = 1;
  std::uint64_t seed = 1;
  std::filesystem::path out = "bqr_out";
  bool identifiable = false;
  bool overdispersed_start = false;
  int joint_moves = 5;  // misclass model only
  std::size_t workers = 0;

  // Throws InvalidConfig.
  void validate() const;
  // Deterministic JSON rendering of every setting; hashed into draw files.
  std::string canonical_json() const;
};

struct SimulateConfig {
  std::vector<ScenarioSpec> grid;
  GridSettings settings;
  std::filesystem::path out = "bqr_sim";

  std::string canonical_json() const;
};

// Relative paths inside a config resolve against `base_dir`. Parse errors
// carry "<source>:<line>:" context.
FitConfig parse_fit_config(const std::string& json_text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");
FitConfig load_fit_config(const std::filesystem::path& path);
SimulateConfig parse_simulate_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir,
                                     const std::string& source = "<config>");
SimulateConfig load_simulate_config(const std::filesystem::path& path);

// Scenario grid from the cross product of the listed settings. The seed group
// hashes only what shapes the simulated data (n, beta, deltas), so datasets are
// shared across quantiles and prior settings and any subset of a grid
// replays identically.
std::vector<ScenarioSpec> expand_grid(std::size_t n, const Vec& beta_true,
                                      const std::vector<double>& quantiles,
                                      const std::vector<std::pair<double, double>>& deltas,
                                      const std::vector<std::int64_t>& n_pess,
                                      const std::vector<double>& b0_scales,
                                      std::size_t replications);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

// ---- data -----------------------------------------------------------------

struct IngestResult {
  Dataset data;
  std::size_t dropped = 0;  // rows with a missing or non-numeric selected value
};

// Reads the outcome and covariate columns, prepends an intercept column named
// "(Intercept)" and drops incomplete rows.
IngestResult ingest_csv(const std::filesystem::path& path, const std::string& outcome,
                        const std::vector<std::string>& covariates);

struct ColumnScaling {
  std::string column;
  double mean = 0.0;
  double sd = 1.0;
};

struct StandardizeResult {
  Dataset data;
  std::vector<ColumnScaling> scaling;
};

// (x - mean) / sd with the n-1 sample standard deviation. A coefficient b
// reported on the standardized scale corresponds to b / sd per raw unit.
StandardizeResult standardize(const Dataset& data, const std::vector<std::string>& continuous);

// ---- draw files -----------------------------------------------------------

struct DrawFile {
  DrawStore draws;
  std::map<std::string, std::string> metadata;
};

void write_draws(const std::filesystem::path& path, const DrawStore& draws,
                 const std::vector<std::pair<std::string, std::string>>& metadata);
DrawFile read_draws(const std::filesystem::path& path);

// ---- commands -------------------------------------------------------------

// Entry point of the `bqr` executable. Returns the process exit code.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bqr::app
