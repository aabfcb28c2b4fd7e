#include "bqr/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "bqr/csv.hpp"
#include "bqr/errors.hpp"
#include "bqr/parallel.hpp"

namespace bqr {

void ScenarioSpec::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v < 1.0; };
  if (beta_true.empty()) throw InvalidConfig("scenario " + id + ": beta_true is empty");
  if (n < beta_true.size()) throw InvalidConfig("scenario " + id + ": n must be >= k");
  if (!(p > 0.0 && p < 1.0)) throw InvalidConfig("scenario " + id + ": p must lie in (0,1)");
  if (!in_unit(delta01_true) || !in_unit(delta10_true)) {
    throw InvalidConfig("scenario " + id + ": misclassification rates must lie in [0,1)");
  }
  if (n_pess < 1) throw InvalidConfig("scenario " + id + ": n_pess must be positive");
  if (!(b0_scale > 0.0)) throw InvalidConfig("scenario " + id + ": B0 scale must be positive");
  if (replications == 0) throw InvalidConfig("scenario " + id + ": need replications");
}

std::vector<std::string> simulation_column_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= k; ++j) names.push_back("beta" + std::to_string(j));
  return names;
}

SimulatedData generate_dataset(const ScenarioSpec& spec, RngStream& rng) {
  const std::size_t n = spec.n;
  const std::size_t k = spec.beta_true.size();
  const QuantileSpec al = al_constants(spec.p);

  DesignMatrix x(n, k);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) = 1.0;
  for (std::size_t j = 1; j < k; ++j) {
    for (double& v : x.column(j)) v = draw::std_normal(rng);
  }

  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < k; ++j) eta += x(i, j) * spec.beta_true[j];
    y[i] = eta + al_sample(al, rng) > 0.0 ? 1 : 0;
  }

  std::vector<std::uint8_t> y_obs(n);
  for (std::size_t i = 0; i < n; ++i) {
    // One uniform per observation regardless of outcome keeps the stream
    // aligned across scenarios.
    const double u = rng.uniform();
    y_obs[i] = y[i] == 1 ? (u < 1.0 - spec.delta01_true ? 1 : 0) : (u < spec.delta10_true ? 1 : 0);
  }
  return {Dataset(std::move(x), std::move(y_obs), simulation_column_names(k)), std::move(y)};
}

ElicitedPriors priors_from_counts(std::int64_t n_pess, std::int64_t t01, std::int64_t t10) {
  if (n_pess < 1 || t01 < 0 || t01 > n_pess || t10 < 0 || t10 > n_pess) {
    throw DomainError("priors_from_counts: counts must lie in [0, n_pess]");
  }
  ElicitedPriors e;
  e.t01 = t01;
  e.t10 = t10;
  e.delta01 = {static_cast<double>(t01 + 1), static_cast<double>(n_pess - t01 + 1)};
  e.delta10 = {static_cast<double>(t10 + 1), static_cast<double>(n_pess - t10 + 1)};
  return e;
}

ElicitedPriors elicit_priors(std::int64_t n_pess, double delta01_true, double delta10_true,
                             RngStream& rng) {
  if (n_pess < 1) throw DomainError("elicit_priors: n_pess must be positive");
  const std::int64_t t10 = draw::binomial(n_pess, delta10_true, rng);
  const std::int64_t t01 = draw::binomial(n_pess, delta01_true, rng);
  return priors_from_counts(n_pess, t01, t10);
}

namespace {

std::uint64_t quantile_code(double p) { return static_cast<std::uint64_t>(std::llround(p * 1e6)); }

struct CellOutcome {
  std::vector<ReplicationEstimate> estimates;
  std::vector<ReplicationFailure> failures;
};

CellOutcome run_cell(const ScenarioSpec& spec, std::size_t rep, const GridSettings& settings) {
  CellOutcome out;
  const RngStream cell(settings.master_seed, {spec.seed_group, static_cast<std::uint64_t>(rep)});
  RngStream data_rng = cell.split(StreamPurpose::kData);
  RngStream prior_rng = cell.split(StreamPurpose::kPrior);
  const SimulatedData sim = generate_dataset(spec, data_rng);
  const ElicitedPriors elicited =
      elicit_priors(spec.n_pess, spec.delta01_true, spec.delta10_true, prior_rng);
  const MisclassPrior prior(NaivePrior::scaled_identity(spec.beta_true.size(), spec.b0_scale),
                            elicited.delta01, elicited.delta10);

  ChainConfig cfg;
  cfg.total_iterations = settings.total_iterations;
  cfg.burn_in = settings.burn_in;
  cfg.thin = settings.thin;
  cfg.p = spec.p;

  for (ModelKind model : settings.models) {
    const RngStream chain_base =
        cell.split(StreamPurpose::kChain, {static_cast<std::uint64_t>(model), quantile_code(spec.p)});
    try {
      const DrawStore draws = run_chains(model, sim.data, prior, cfg, settings.chains, chain_base, 1,
                                           MisclassOptions{false, settings.joint_moves});
      out.estimates.push_back({spec.id, rep, model, summarize(draws)});
    } catch (const Error& e) {
      out.failures.push_back({spec.id, rep, model, e.what()});
    }
  }
  return out;
}

}  // namespace

GridResult run_grid(const std::vector<ScenarioSpec>& grid, const GridSettings& settings) {
  if (grid.empty()) throw InvalidConfig("run_grid: empty scenario grid");
  if (settings.models.empty()) throw InvalidConfig("run_grid: no models selected");
  ChainConfig probe;
  probe.total_iterations = settings.total_iterations;
  probe.burn_in = settings.burn_in;
  probe.thin = settings.thin;
  probe.validate();
  for (const auto& s : grid) s.validate();

  struct Cell {
    std::size_t scenario;
    std::size_t rep;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    for (std::size_t r = 0; r < grid[s].replications; ++r) cells.push_back({s, r});
  }

  std::vector<CellOutcome> outcomes(cells.size());
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(cells.size(), worker_count(settings.workers), [&](std::size_t c) {
    outcomes[c] = run_cell(grid[cells[c].scenario], cells[c].rep, settings);
    if (settings.progress) {
      std::lock_guard lock(progress_mutex);
      ++done;
      std::fprintf(stderr, "\r[simulate] %zu/%zu cells", done, cells.size());
      if (done == cells.size()) std::fprintf(stderr, "\n");
    }
  });

  GridResult result;
  for (const auto& o : outcomes) {
    result.estimates.insert(result.estimates.end(), o.estimates.begin(), o.estimates.end());
    result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
  }

  // Ordered reduction: scenario order, then model order from the settings.
  for (const auto& spec : grid) {
    for (ModelKind model : settings.models) {
      std::vector<std::vector<Summary>> per_rep;
      for (const auto& e : result.estimates) {
        if (e.scenario == spec.id && e.model == model) per_rep.push_back(e.summaries);
      }
      if (per_rep.empty()) continue;
      const auto metrics = replication_metrics(per_rep, spec.beta_true);
      for (const auto& m : metrics) {
        MetricRow row;
        row.scenario = spec.id;
        row.delta01 = spec.delta01_true;
        row.delta10 = spec.delta10_true;
        row.n_pess = spec.n_pess;
        row.b0_scale = spec.b0_scale;
        row.p = spec.p;
        row.model = model;
        row.parameter = m.parameter;
        row.mse = m.mse;
        row.bias = m.bias;
        row.coverage = m.coverage;
        row.n_effective = m.replications;
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

void write_grid_csvs(const GridResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::vector<std::string> header = {"scenario", "delta01", "delta10", "n_pess",
                                           "B0_scale", "p",       "model",   "parameter",
                                           "value",    "n_effective_replications"};
  struct Metric {
    const char* file;
    double MetricRow::*field;
  };
  for (const Metric m : {Metric{"mse.csv", &MetricRow::mse}, Metric{"bias.csv", &MetricRow::bias},
                         Metric{"coverage.csv", &MetricRow::coverage}}) {
    CsvWriter w(dir / m.file);
    w.row(header);
    for (const auto& r : result.rows) {
      w.row({r.scenario, format_double(r.delta01), format_double(r.delta10),
             std::to_string(r.n_pess), format_double(r.b0_scale), format_double(r.p),
             model_name(r.model), r.parameter, format_double(r.*(m.field)),
             std::to_string(r.n_effective)});
    }
  }
  {
    CsvWriter w(dir / "replications.csv");
    w.row({"scenario", "replication", "model", "parameter", "mean", "lower", "upper"});
    for (const auto& e : result.estimates) {
      for (const auto& s : e.summaries) {
        w.row({e.scenario, std::to_string(e.replication), model_name(e.model), s.parameter,
               format_double(s.mean), format_double(s.lower), format_double(s.upper)});
      }
    }
  }
  {
    CsvWriter w(dir / "failures.csv");
    w.row({"scenario", "replication", "model", "message"});
    for (const auto& f : result.failures) {
      w.row({f.scenario, std::to_string(f.replication), model_name(f.model), f.message});
    }
  }
}

}  // namespace bqr
