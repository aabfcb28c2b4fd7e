#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bqr/app.hpp"
#include "bqr/errors.hpp"

namespace bqr::app {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Reads typed values out of a parsed document and reports failures with the
// line on which the offending key first appears.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {
    try {
      doc_ = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InvalidConfig(source_ + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " +
                          e.what());
    }
    if (!doc_.is_object()) throw InvalidConfig(source_ + ":1: top level must be a JSON object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::size_t at = text_.find("\"" + key + "\"");
    const std::size_t line = at == std::string::npos ? 1 : line_of_offset(text_, at);
    throw InvalidConfig(source_ + ":" + std::to_string(line) + ": '" + key + "': " + msg);
  }

  void check_keys(const json& obj, const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(k, "unknown setting");
    }
  }

  const json& doc() const { return doc_; }

  template <typename T>
  T get(const json& obj, const std::string& key, T fallback) const {
    if (!obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception& e) {
      fail(key, e.what());
    }
  }

  template <typename T>
  T require(const json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail(key, "required setting is missing");
    return get<T>(obj, key, T{});
  }

  BetaPrior beta_prior(const json& obj, const std::string& key) const {
    const auto v = get<std::vector<double>>(obj, key, {});
    if (v.size() != 2) fail(key, "expected [a, b]");
    return {v[0], v[1]};
  }

 private:
  const std::string& text_;
  std::string source_;
  json doc_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ModelKind model_from(const Reader& r, const std::string& key, const std::string& name) {
  try {
    return parse_model(name);
  } catch (const Error& e) {
    r.fail(key, e.what());
  }
}

std::uint64_t seed_group_for(std::size_t n, const Vec& beta, double d01, double d10) {
  std::string key = std::to_string(n);
  char buf[40];
  for (double b : beta) {
    std::snprintf(buf, sizeof buf, ",%.17g", b);
    key += buf;
  }
  std::snprintf(buf, sizeof buf, "|%.17g", d01);
  key += buf;
  std::snprintf(buf, sizeof buf, "|%.17g", d10);
  key += buf;
  return fnv1a64(key);
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void FitConfig::validate() const {
  if (outcome.empty()) throw InvalidConfig("fit: outcome column not set");
  if (input.empty()) throw InvalidConfig("fit: input path not set");
  for (const auto& c : continuous) {
    if (std::find(covariates.begin(), covariates.end(), c) == covariates.end()) {
      throw InvalidConfig("fit: continuous column '" + c + "' is not a covariate");
    }
  }
  if (quantiles.empty()) throw InvalidConfig("fit: no quantiles");
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidConfig("fit: quantiles must lie in (0,1)");
  }
  if (chains < 1) throw InvalidConfig("fit: chains must be >= 1");
  if (joint_moves < 0) throw InvalidConfig("fit: joint_moves must be >= 0");
  const std::size_t k = covariates.size() + 1;
  if (!beta0_vec.empty() && beta0_vec.size() != k) {
    throw InvalidConfig("fit: beta0 has " + std::to_string(beta0_vec.size()) +
                        " entries, model has " + std::to_string(k));
  }
  if (!b0_diag.empty() && b0_diag.size() != k) {
    throw InvalidConfig("fit: b0_diag has " + std::to_string(b0_diag.size()) +
                        " entries, model has " + std::to_string(k));
  }
  for (double v : b0_diag) {
    if (!(v > 0.0)) throw InvalidConfig("fit: b0_diag entries must be positive");
  }
  if (b0_diag.empty() && !(b0_scale > 0.0)) throw InvalidConfig("fit: b0_scale must be positive");
  for (const auto& d : {delta01, delta10}) {
    if (d && !(d->a > 0.0 && d->b > 0.0)) {
      throw InvalidConfig("fit: Beta hyperparameters must be positive");
    }
  }
  ChainConfig cc;
  cc.total_iterations = iterations;
  cc.burn_in = burn_in;
  cc.thin = thin;
  cc.validate();
}

std::string FitConfig::canonical_json() const {
  json j;
  j["input"] = input.string();
  j["outcome"] = outcome;
  j["covariates"] = covariates;
  j["continuous"] = continuous;
  j["quantiles"] = quantiles;
  j["model"] = model_name(model);
  json prior;
  if (beta0_vec.empty()) {
    prior["beta0"] = beta0;
  } else {
    prior["beta0"] = beta0_vec;
  }
  if (b0_diag.empty()) {
    prior["b0_scale"] = b0_scale;
  } else {
    prior["b0_diag"] = b0_diag;
  }
  if (delta01) prior["delta01"] = {delta01->a, delta01->b};
  if (delta10) prior["delta10"] = {delta10->a, delta10->b};
  j["prior"] = prior;
  j["chains"] = chains;
  j["iterations"] = iterations;
  j["burn_in"] = burn_in;
  j["thin"] = thin;
  j["seed"] = seed;
  j["identifiable"] = identifiable;
  j["overdispersed_start"] = overdispersed_start;
  j["joint_moves"] = joint_moves;
  // Output location and worker count do not affect results.
  return j.dump();
}

FitConfig parse_fit_config(const std::string& json_text, const std::filesystem::path& base_dir,
                           const std::string& source) {
  const Reader r(json_text, source);
  const json& d = r.doc();
  r.check_keys(d, {"input", "outcome", "covariates", "continuous", "quantiles", "model", "prior",
                   "chains", "iterations", "burn_in", "thin", "seed", "out", "identifiable",
                   "overdispersed_start", "joint_moves", "workers"});
  FitConfig c;
  c.input = resolve(base_dir, r.require<std::string>(d, "input"));
  c.outcome = r.require<std::string>(d, "outcome");
  c.covariates = r.get<std::vector<std::string>>(d, "covariates", {});
  c.continuous = r.get<std::vector<std::string>>(d, "continuous", {});
  c.quantiles = r.get<std::vector<double>>(d, "quantiles", c.quantiles);
  c.model = model_from(r, "model", r.get<std::string>(d, "model", model_name(c.model)));
  if (d.contains("prior")) {
    const json& p = d.at("prior");
    if (!p.is_object()) r.fail("prior", "expected an object");
    r.check_keys(p, {"beta0", "b0_scale", "b0_diag", "delta01", "delta10"});
    if (p.contains("beta0")) {
      if (p.at("beta0").is_array()) {
        c.beta0_vec = r.get<Vec>(p, "beta0", {});
      } else {
        c.beta0 = r.get<double>(p, "beta0", 0.0);
      }
    }
    c.b0_scale = r.get<double>(p, "b0_scale", c.b0_scale);
    c.b0_diag = r.get<Vec>(p, "b0_diag", {});
    if (p.contains("delta01")) c.delta01 = r.beta_prior(p, "delta01");
    if (p.contains("delta10")) c.delta10 = r.beta_prior(p, "delta10");
  }
  c.chains = r.get<std::size_t>(d, "chains", c.chains);
  c.iterations = r.get<long>(d, "iterations", c.iterations);
  c.burn_in = r.get<long>(d, "burn_in", c.burn_in);
  c.thin = r.get<long>(d, "thin", c.thin);
  c.seed = r.get<std::uint64_t>(d, "seed", c.seed);
  c.out = resolve(base_dir, r.get<std::string>(d, "out", c.out.string()));
  c.identifiable = r.get<bool>(d, "identifiable", c.identifiable);
  c.overdispersed_start = r.get<bool>(d, "overdispersed_start", c.overdispersed_start);
  c.joint_moves = r.get<int>(d, "joint_moves", c.joint_moves);
  c.workers = r.get<std::size_t>(d, "workers", c.workers);
  return c;
}

FitConfig load_fit_config(const std::filesystem::path& path) {
  return parse_fit_config(read_file(path), path.parent_path(), path.string());
}

std::vector<ScenarioSpec> expand_grid(std::size_t n, const Vec& beta_true,
                                      const std::vector<double>& quantiles,
                                      const std::vector<std::pair<double, double>>& deltas,
                                      const std::vector<std::int64_t>& n_pess,
                                      const std::vector<double>& b0_scales,
                                      std::size_t replications) {
  std::vector<ScenarioSpec> grid;
  for (const auto& [d01, d10] : deltas) {
    for (std::int64_t np : n_pess) {
      for (double b0 : b0_scales) {
        for (double q : quantiles) {
          ScenarioSpec s;
          s.id = "d" + short_num(d01) + "-" + short_num(d10) + "_npess" + std::to_string(np) +
                 "_B" + short_num(b0) + "_p" + short_num(q);
          s.n = n;
          s.beta_true = beta_true;
          s.p = q;
          s.delta01_true = d01;
          s.delta10_true = d10;
          s.n_pess = np;
          s.b0_scale = b0;
          s.replications = replications;
          s.seed_group = seed_group_for(n, beta_true, d01, d10);
          grid.push_back(std::move(s));
        }
      }
    }
  }
  return grid;
}

std::string SimulateConfig::canonical_json() const {
  json j;
  j["seed"] = settings.master_seed;
  j["iterations"] = settings.total_iterations;
  j["burn_in"] = settings.burn_in;
  j["thin"] = settings.thin;
  j["chains"] = settings.chains;
  j["joint_moves"] = settings.joint_moves;
  std::vector<std::string> models;
  for (ModelKind m : settings.models) models.emplace_back(model_name(m));
  j["models"] = models;
  json scenarios = json::array();
  for (const auto& s : grid) {
    scenarios.push_back({{"id", s.id},
                         {"n", s.n},
                         {"beta_true", s.beta_true},
                         {"p", s.p},
                         {"delta01", s.delta01_true},
                         {"delta10", s.delta10_true},
                         {"n_pess", s.n_pess},
                         {"b0_scale", s.b0_scale},
                         {"replications", s.replications},
                         {"seed_group", s.seed_group}});
  }
  j["scenarios"] = scenarios;
  return j.dump();
}

SimulateConfig parse_simulate_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir,
                                     const std::string& source) {
  const Reader r(json_text, source);
  const json& d = r.doc();
  r.check_keys(d, {"seed", "out", "iterations", "burn_in", "thin", "chains", "workers", "models",
                   "joint_moves", "replications", "n", "beta_true", "quantiles", "misclassification",
                   "n_pess", "b0_scale"});
  SimulateConfig c;
  c.settings.master_seed = r.get<std::uint64_t>(d, "seed", c.settings.master_seed);
  c.out = resolve(base_dir, r.get<std::string>(d, "out", c.out.string()));
  c.settings.total_iterations = r.get<long>(d, "iterations", c.settings.total_iterations);
  c.settings.burn_in = r.get<long>(d, "burn_in", c.settings.burn_in);
  c.settings.thin = r.get<long>(d, "thin", c.settings.thin);
  c.settings.chains = r.get<std::size_t>(d, "chains", c.settings.chains);
  c.settings.workers = r.get<std::size_t>(d, "workers", 0);
  c.settings.joint_moves = r.get<int>(d, "joint_moves", c.settings.joint_moves);
  if (c.settings.joint_moves < 0) r.fail("joint_moves", "must be >= 0");
  if (d.contains("models")) {
    c.settings.models.clear();
    for (const auto& m : r.get<std::vector<std::string>>(d, "models", {})) {
      c.settings.models.push_back(model_from(r, "models", m));
    }
  }
  const auto reps = r.get<std::size_t>(d, "replications", 20);
  const auto n = r.get<std::size_t>(d, "n", 1000);
  const auto beta = r.get<Vec>(d, "beta_true", {0.0, 1.0, -0.5});
  const auto quantiles = r.get<std::vector<double>>(d, "quantiles", {0.5});
  std::vector<std::pair<double, double>> deltas;
  for (const auto& pair :
       r.get<std::vector<std::vector<double>>>(d, "misclassification", {{0.4, 0.2}})) {
    if (pair.size() != 2) r.fail("misclassification", "entries must be [delta01, delta10]");
    deltas.emplace_back(pair[0], pair[1]);
  }
  const auto n_pess = r.get<std::vector<std::int64_t>>(d, "n_pess", {30});
  const auto b0 = r.get<std::vector<double>>(d, "b0_scale", {10.0});
  if (quantiles.empty() || deltas.empty() || n_pess.empty() || b0.empty()) {
    throw InvalidConfig(source + ": every grid axis needs at least one value");
  }
  c.grid = expand_grid(n, beta, quantiles, deltas, n_pess, b0, reps);
  for (const auto& s : c.grid) s.validate();
  return c;
}

SimulateConfig load_simulate_config(const std::filesystem::path& path) {
  return parse_simulate_config(read_file(path), path.parent_path(), path.string());
}

}  // namespace bqr::app
