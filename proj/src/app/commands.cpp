#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "bqr/app.hpp"
#include "bqr/csv.hpp"
#include "bqr/diagnostics.hpp"
#include "bqr/errors.hpp"

namespace bqr::app {

namespace {

constexpr BetaPrior kDefaultDelta01{7.6, 5.0};
constexpr BetaPrior kDefaultDelta10{9.7, 165.7};
constexpr double kPsrfThreshold = 1.1;

std::uint64_t quantile_code(double p) { return static_cast<std::uint64_t>(std::llround(p * 1e6)); }

// Left-aligned text table for console output.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
  }
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      out << std::left << std::setw(static_cast<int>(width[j])) << r[j];
      out << (j + 1 < r.size() ? "  " : "\n");
    }
  }
}

const std::vector<std::string> kSummaryHeader = {"quantile", "model", "variable", "mean",
                                                 "lower", "upper", "excludes_zero"};

std::vector<std::vector<std::string>> summary_rows(const std::string& quantile,
                                                   const std::string& model,
                                                   const std::vector<Summary>& summaries,
                                                   bool full_precision) {
  auto fmt = [&](double v) { return full_precision ? format_double(v) : format_sig(v); };
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : summaries) {
    rows.push_back({quantile, model, s.parameter, fmt(s.mean), fmt(s.lower), fmt(s.upper),
                    s.excludes_zero ? "*" : ""});
  }
  return rows;
}

void write_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  CsvWriter w(path);
  w.row(header);
  for (const auto& r : rows) w.row(r);
  w.close();
}

NaivePrior beta_prior_for(const FitConfig& cfg, std::size_t k) {
  Vec beta0 = cfg.beta0_vec.empty() ? Vec(k, cfg.beta0) : cfg.beta0_vec;
  Vec diag = cfg.b0_diag.empty() ? Vec(k, cfg.b0_scale) : cfg.b0_diag;
  return NaivePrior::from_covariance(std::move(beta0), SpdMatrix(SquareMatrix::diagonal(diag)));
}

std::string draws_file_name(ModelKind model, double q) {
  return std::string("draws_") + model_name(model) + "_p" + format_double(q) + ".csv";
}

struct FitOverrides {
  std::string model;
  std::vector<double> quantiles;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<long> iterations;
  std::optional<long> burn_in;
  std::optional<long> thin;
  std::optional<std::size_t> chains;
  std::optional<std::size_t> workers;
};

int do_fit(const std::string& config_path, const FitOverrides& ov, std::ostream& out,
           std::ostream& err) {
  FitConfig cfg = load_fit_config(config_path);
  if (!ov.model.empty()) cfg.model = parse_model(ov.model);
  if (!ov.quantiles.empty()) cfg.quantiles = ov.quantiles;
  if (ov.seed) cfg.seed = *ov.seed;
  if (!ov.out.empty()) cfg.out = ov.out;
  if (ov.iterations) cfg.iterations = *ov.iterations;
  if (ov.burn_in) cfg.burn_in = *ov.burn_in;
  if (ov.thin) cfg.thin = *ov.thin;
  if (ov.chains) cfg.chains = *ov.chains;
  if (ov.workers) cfg.workers = *ov.workers;
  if (cfg.model == ModelKind::kMisclass && (!cfg.delta01 || !cfg.delta10)) {
    err << "warning: no misclassification priors given; using Beta(7.6, 5) for delta01 and "
           "Beta(9.7, 165.7) for delta10\n";
    if (!cfg.delta01) cfg.delta01 = kDefaultDelta01;
    if (!cfg.delta10) cfg.delta10 = kDefaultDelta10;
  }
  cfg.validate();

  const IngestResult ingested = ingest_csv(cfg.input, cfg.outcome, cfg.covariates);
  err << "read " << ingested.data.n() << " complete rows from " << cfg.input.string();
  if (ingested.dropped > 0) err << " (dropped " << ingested.dropped << " incomplete)";
  err << "\n";
  const StandardizeResult std_data = standardize(ingested.data, cfg.continuous);
  const Dataset& data = std_data.data;

  // The naive model ignores the delta priors; placeholders keep one prior type.
  const MisclassPrior prior(beta_prior_for(cfg, data.k()), cfg.delta01.value_or(BetaPrior{1, 1}),
                            cfg.delta10.value_or(BetaPrior{1, 1}));
  const std::string config_hash = "fnv1a64:" + hex64(fnv1a64(cfg.canonical_json()));
  std::filesystem::create_directories(cfg.out);

  const RngStream root(cfg.seed);
  const std::string model = model_name(cfg.model);
  std::vector<std::vector<std::string>> summary_csv;
  std::vector<std::vector<std::string>> summary_console;
  std::vector<std::vector<std::string>> psrf_csv;
  std::vector<std::vector<std::string>> psrf_console;
  std::size_t not_converged = 0;
  for (double q : cfg.quantiles) {
    ChainConfig cc;
    cc.total_iterations = cfg.iterations;
    cc.burn_in = cfg.burn_in;
    cc.thin = cfg.thin;
    cc.p = q;
    cc.overdispersed_start = cfg.overdispersed_start;
    const RngStream base =
        root.split(StreamPurpose::kChain, {static_cast<std::uint64_t>(cfg.model), quantile_code(q)});
    const DrawStore draws = run_chains(cfg.model, data, prior, cc, cfg.chains, base, cfg.workers,
                                       MisclassOptions{cfg.identifiable, cfg.joint_moves});
    const std::string qs = format_double(q);
    write_draws(cfg.out / draws_file_name(cfg.model, q), draws,
                {{"seed", std::to_string(cfg.seed)},
                 {"config_hash", config_hash},
                 {"model", model},
                 {"quantile", qs}});
    const auto summaries = summarize(draws);
    for (auto& r : summary_rows(qs, model, summaries, true)) summary_csv.push_back(std::move(r));
    for (auto& r : summary_rows(format_sig(q), model, summaries, false)) {
      summary_console.push_back(std::move(r));
    }
    if (cfg.chains >= 2) {
      for (const auto& name : draws.names()) {
        const double r = psrf(draws, name);
        if (!(r < kPsrfThreshold)) ++not_converged;
        psrf_csv.push_back({qs, model, name, format_double(r)});
        psrf_console.push_back({format_sig(q), model, name, format_sig(r)});
      }
    }
  }

  write_rows(cfg.out / "summary.csv", kSummaryHeader, summary_csv);
  if (cfg.chains >= 2) {
    write_rows(cfg.out / "psrf.csv", {"quantile", "model", "parameter", "psrf"}, psrf_csv);
  } else {
    err << "note: PSRF needs at least two chains; psrf.csv not written\n";
  }
  std::vector<std::vector<std::string>> scaling;
  for (const auto& s : std_data.scaling) {
    scaling.push_back({s.column, format_double(s.mean), format_double(s.sd)});
  }
  write_rows(cfg.out / "scaling.csv", {"variable", "mean", "sd"}, scaling);

  summary_console.insert(summary_console.begin(), kSummaryHeader);
  print_table(out, summary_console);
  if (!psrf_console.empty()) {
    out << "\n";
    psrf_console.insert(psrf_console.begin(), {"quantile", "model", "parameter", "psrf"});
    print_table(out, psrf_console);
  }
  if (not_converged > 0) {
    err << "warning: " << not_converged << " parameter(s) with PSRF >= " << kPsrfThreshold
        << "\n";
  }
  err << "wrote results to " << cfg.out.string() << "\n";
  return 0;
}

struct SimulateOverrides {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> replications;
  std::optional<std::size_t> workers;
  bool progress = false;
};

int do_simulate(const std::string& config_path, const SimulateOverrides& ov, std::ostream& out,
                std::ostream& err) {
  SimulateConfig cfg = load_simulate_config(config_path);
  if (ov.seed) cfg.settings.master_seed = *ov.seed;
  if (!ov.out.empty()) cfg.out = ov.out;
  if (ov.replications) {
    for (auto& s : cfg.grid) s.replications = *ov.replications;
  }
  if (ov.workers) cfg.settings.workers = *ov.workers;
  cfg.settings.progress = ov.progress;

  const GridResult result = run_grid(cfg.grid, cfg.settings);
  write_grid_csvs(result, cfg.out);
  {
    std::ofstream f(cfg.out / "config.json", std::ios::binary);
    f << cfg.canonical_json() << "\n";
    if (!f) throw IoError("cannot write " + (cfg.out / "config.json").string());
  }

  std::vector<std::vector<std::string>> table = {
      {"scenario", "model", "parameter", "mse", "bias", "coverage", "n_eff"}};
  for (const auto& r : result.rows) {
    table.push_back({r.scenario, model_name(r.model), r.parameter, format_sig(r.mse),
                     format_sig(r.bias), format_sig(r.coverage), std::to_string(r.n_effective)});
  }
  print_table(out, table);
  if (!result.failures.empty()) {
    err << "warning: " << result.failures.size()
        << " replication run(s) failed and were excluded; see failures.csv\n";
  }
  err << "wrote results to " << cfg.out.string() << "\n";
  return 0;
}

int do_summarize(const std::string& draws_path, const std::string& out_path, std::ostream& out) {
  const DrawFile file = read_draws(draws_path);
  const auto summaries = summarize(file.draws);
  auto meta = [&](const std::string& key) {
    const auto it = file.metadata.find(key);
    return it == file.metadata.end() ? std::string() : it->second;
  };
  if (!out_path.empty()) {
    write_rows(out_path, kSummaryHeader, summary_rows(meta("quantile"), meta("model"), summaries, true));
  }
  std::string q = meta("quantile");
  double qv = 0.0;
  if (parse_double(q, qv)) q = format_sig(qv);
  auto rows = summary_rows(q, meta("model"), summaries, false);
  rows.insert(rows.begin(), kSummaryHeader);
  print_table(out, rows);
  return 0;
}

int do_psrf(const std::string& draws_path, const std::string& param, std::ostream& out) {
  const DrawFile file = read_draws(draws_path);
  std::vector<std::vector<std::string>> rows = {{"parameter", "psrf"}};
  if (!param.empty()) {
    rows.push_back({param, format_sig(psrf(file.draws, param))});
  } else {
    for (const auto& name : file.draws.names()) {
      rows.push_back({name, format_sig(psrf(file.draws, name))});
    }
  }
  print_table(out, rows);
  return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Bayesian binary quantile regression with misclassified outcomes", "bqr"};
  cli.require_subcommand(1);

  std::string config_path;
  FitOverrides fit_ov;
  auto* fit = cli.add_subcommand("fit", "Fit a model to a CSV dataset at one or more quantiles");
  fit->add_option("--config", config_path, "JSON fit configuration")->required();
  fit->add_option("--model", fit_ov.model, "naive or misclass");
  fit->add_option("--quantile", fit_ov.quantiles, "Quantile(s) in (0,1); repeatable");
  fit->add_option("--seed", fit_ov.seed, "Master seed");
  fit->add_option("--out", fit_ov.out, "Output directory");
  fit->add_option("--iterations", fit_ov.iterations, "Iterations per chain, burn-in included");
  fit->add_option("--burn-in", fit_ov.burn_in, "Discarded leading iterations");
  fit->add_option("--thin", fit_ov.thin, "Keep every thin-th post burn-in draw");
  fit->add_option("--chains", fit_ov.chains, "Number of chains");
  fit->add_option("--workers", fit_ov.workers, "Worker threads (BQR_THREADS caps this)");

  SimulateOverrides sim_ov;
  auto* sim = cli.add_subcommand("simulate", "Run a simulation grid");
  sim->add_option("--config", config_path, "JSON simulation configuration")->required();
  sim->add_option("--seed", sim_ov.seed, "Master seed");
  sim->add_option("--out", sim_ov.out, "Output directory");
  sim->add_option("--replications", sim_ov.replications, "Replications per scenario");
  sim->add_option("--workers", sim_ov.workers, "Worker threads (BQR_THREADS caps this)");
  sim->add_flag("--progress", sim_ov.progress, "Report progress on stderr");

  std::string draws_path;
  std::string summary_out;
  auto* summ = cli.add_subcommand("summarize", "Posterior summaries from a draws file");
  summ->add_option("--draws", draws_path, "Draws CSV written by fit")->required();
  summ->add_option("--out", summary_out, "Also write the summary CSV here");

  std::string param;
  auto* ps = cli.add_subcommand("psrf", "Potential scale reduction factors from a draws file");
  ps->add_option("--draws", draws_path, "Draws CSV written by fit")->required();
  ps->add_option("--param", param, "Single parameter name");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    if (code != 0) err << "\n" << cli.help();
    return code;
  }

  const CLI::App* cmd = cli.get_subcommands().front();
  try {
    if (cmd == fit) return do_fit(config_path, fit_ov, out, err);
    if (cmd == sim) return do_simulate(config_path, sim_ov, out, err);
    if (cmd == summ) return do_summarize(draws_path, summary_out, out);
    return do_psrf(draws_path, param, out);
  } catch (const std::exception& e) {
    err << "bqr " << cmd->get_name() << ": error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bqr::app
