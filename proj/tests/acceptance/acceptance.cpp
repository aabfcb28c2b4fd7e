// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers. Criteria listed in kKnownDeviations are reported as FAIL when they
// fail but do not change the exit status; README.md explains each one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bqr/csv.hpp"
#include "bqr/diagnostics.hpp"
#include "bqr/distributions.hpp"
#include "bqr/gibbs.hpp"
#include "bqr/simulation.hpp"
#include "geweke.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bqr;

namespace {

const std::set<std::string> kKnownDeviations = {"AC4"};

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt(double v) { return format_sig(v, 4); }

fs::path work_dir() { return fs::path(BQR_TEST_TMPDIR) / "acceptance"; }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + BQR_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Byte comparison of every regular file under two directories.
bool same_tree(const fs::path& a, const fs::path& b, std::string& detail) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
  if (files.empty() || files.size() != count_b) {
    detail = "file sets differ";
    return false;
  }
  for (const auto& f : files) {
    if (slurp(a / f) != slurp(b / f)) {
      detail = f.string() + " differs";
      return false;
    }
  }
  detail = std::to_string(files.size()) + " files identical";
  return true;
}

// ---- 1: joint-distribution checks -----------------------------------------

Outcome ac1() {
  Outcome o;
  for (ModelKind model : {ModelKind::kNaive, ModelKind::kMisclass}) {
    for (double p : {0.25, 0.5, 0.75}) {
      std::vector<testing::GewekeSetup> setups;
      testing::GewekeSetup g;
      g.model = model;
      g.p = p;
      g.draws = 50000;
      g.seed = 20240601 + static_cast<std::uint64_t>(p * 100);
      setups.push_back(g);
      if (model == ModelKind::kMisclass) {
        // Carried latents and the joint Metropolis moves used in practice.
        g.keep_latents = true;
        g.joint_moves = 3;
        setups.push_back(g);
      }
      for (const auto& s : setups) {
        double worst = 0.0;
        std::string worst_name;
        for (const auto& m : testing::run_geweke(s)) {
          if (std::abs(m.z) > worst) {
            worst = std::abs(m.z);
            worst_name = m.name;
          }
        }
        o.check(worst < 4.0, std::string(model_name(model)) + " p=" + fmt(p) +
                                 (s.keep_latents ? " (latents carried, joint moves)" : "") +
                                 ": max |z| = " + fmt(worst) + " (" + worst_name + ")");
      }
    }
  }
  return o;
}

// ---- 2: kernel oracles ------------------------------------------------------

double ref_al_pdf(double x, double p) {
  return p * (1.0 - p) * std::exp(-(x < 0.0 ? (p - 1.0) * x : p * x));
}

// cdf of N(mu, sd^2) truncated to (lo, hi); the tail form keeps precision
// when the whole interval lies far above the mean.
double trunc_normal_cdf(double x, double mu, double sd, double lo, double hi) {
  const double a = (lo - mu) / sd;
  const double b = (hi - mu) / sd;
  const double t = (x - mu) / sd;
  auto q = [](double v) { return 0.5 * std::erfc(v / std::sqrt(2.0)); };
  if (a >= 0.0) return (q(a) - q(t)) / (q(a) - q(b));
  return (testing::normal_cdf(t) - testing::normal_cdf(a)) /
         (testing::normal_cdf(b) - testing::normal_cdf(a));
}

Outcome ac2() {
  Outcome o;
  double worst = 0.0;
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    for (int i = 0; i < 100; ++i) {
      const double x = -12.0 + 24.0 * i / 99.0;
      // Integrate each smooth piece separately; the density has a kink at 0.
      auto pdf = [p](double t) { return ref_al_pdf(t, p); };
      const double ref = x <= 0.0 ? testing::integrate(pdf, -kInf, x)
                                  : testing::integrate(pdf, -kInf, 0.0) +
                                        testing::integrate(pdf, 0.0, x);
      worst = std::max(worst, std::abs(al_cdf(x, p) - ref));
    }
  }
  o.check(worst <= 1e-8, "al_cdf vs quadrature, 5 x 100 grid: max error " + fmt(worst));

  RngStream rng(777);
  int gig_bad = 0;
  double gig_worst = 0.0;
  const std::vector<double> grid = {0.05, 0.5, 2.0, 20.0};
  for (double chi : grid) {
    for (double psi : grid) {
      const std::size_t n = 1000000;
      double s1 = 0, s2 = 0, s4 = 0, si = 0, si2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = gig_half_sample(chi, psi, rng);
        s1 += w;
        s2 += w * w;
        s4 += w * w * w * w;
        si += 1.0 / w;
        si2 += 1.0 / (w * w);
      }
      const double dn = static_cast<double>(n);
      const double m1 = s1 / dn, m2 = s2 / dn, mi = si / dn;
      const double se1 = std::sqrt((m2 - m1 * m1) / dn);
      const double se2 = std::sqrt((s4 / dn - m2 * m2) / dn);
      const double sei = std::sqrt((si2 / dn - mi * mi) / dn);
      const double z1 = (m1 - testing::gig_half_moment(chi, psi, 1)) / se1;
      const double z2 = (m2 - testing::gig_half_moment(chi, psi, 2)) / se2;
      const double zi = (mi - testing::gig_half_moment(chi, psi, -1)) / sei;
      for (double z : {z1, z2, zi}) {
        gig_worst = std::max(gig_worst, std::abs(z));
        gig_bad += std::abs(z) >= 4.0;
      }
    }
  }
  o.check(gig_bad == 0, "GIG(1/2) E[W], E[W^2], E[1/W] on 4 x 4 grid, 1e6 draws: max |z| = " +
                            fmt(gig_worst));

  struct Case {
    double mu, var, lo, hi;
  };
  const std::vector<Case> cases = {{0, 1, 0, kInf},   {0, 1, -kInf, 0},  {8, 1, 0, kInf},
                                   {-8, 1, 0, kInf},  {8, 1, -kInf, 0},  {-8, 1, -kInf, 0},
                                   {-8, 4, 0, kInf},  {8, 0.25, -kInf, 0}, {0, 1, -0.5, 0.7},
                                   {-8, 1, 1, 2}};
  double min_p = 1.0;
  for (const auto& c : cases) {
    const std::size_t n = 100000;
    std::vector<double> x(n);
    for (double& v : x) v = trunc_normal_sample(c.mu, c.var, c.lo, c.hi, rng);
    const double sd = std::sqrt(c.var);
    const double d = testing::ks_statistic(
        x, [&](double t) { return trunc_normal_cdf(t, c.mu, sd, c.lo, c.hi); });
    min_p = std::min(min_p, testing::ks_pvalue(d, n));
  }
  o.check(min_p > 0.001, "truncated normal KS, 10 cases incl. mean offsets +-8: min p = " +
                             fmt(min_p));
  return o;
}

// ---- 3: conjugate update ------------------------------------------------------

Outcome ac3() {
  Outcome o;
  RngStream rng(303);
  const MisclassPrior prior(NaivePrior::scaled_identity(1, 10.0), {1.5, 2.5}, {0.7, 9.0});
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 200);
    std::vector<std::uint8_t> y(n), y_obs(n);
    double c10 = 0, c11 = 0, c01 = 0, c00 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform() < 0.4;
      y_obs[i] = rng.uniform() < 0.6;
      if (y[i] && !y_obs[i]) ++c10;
      if (y[i] && y_obs[i]) ++c11;
      if (!y[i] && y_obs[i]) ++c01;
      if (!y[i] && !y_obs[i]) ++c00;
    }
    const DeltaPosterior post = delta_posterior(y, y_obs, prior);
    mismatches += !(post.delta01.a == 1.5 + c10 && post.delta01.b == 2.5 + c11 &&
                    post.delta10.a == 0.7 + c01 && post.delta10.b == 9.0 + c00);
  }
  o.check(mismatches == 0, "Beta parameters vs brute-force cell counts, 1000 pairs: " +
                               std::to_string(mismatches) + " mismatches");
  return o;
}

// ---- 4: desk-scale simulation (runs the CLI) ---------------------------------

using MetricTable = std::map<std::string, double>;  // "model/parameter" -> value

MetricTable read_metric(const fs::path& p) {
  const CsvTable t = read_csv(p);
  MetricTable m;
  for (const auto& r : t.rows) {
    double v = 0.0;
    parse_double(r[t.column("value")], v);
    m[r[t.column("model")] + "/" + r[t.column("parameter")]] = v;
  }
  return m;
}

const fs::path kDeskConfig = fs::path(BQR_SOURCE_DIR) / "configs" / "simulate_desk.json";

Outcome ac4() {
  Outcome o;
  const fs::path out = work_dir() / "sim_a";
  fs::remove_all(out);
  const int rc = run_cli("simulate --config \"" + kDeskConfig.string() + "\" --out \"" +
                             out.string() + "\"",
                         work_dir() / "sim_a.log");
  if (rc != 0) {
    o.check(false, "bqr simulate exited with status " + std::to_string(rc));
    return o;
  }
  const MetricTable bias = read_metric(out / "bias.csv");
  const MetricTable cov = read_metric(out / "coverage.csv");
  const MetricTable mse = read_metric(out / "mse.csv");
  const double nb = bias.at("naive/beta2");
  const double mb = bias.at("misclass/beta2");
  const double nc = cov.at("naive/beta2");
  const double mc = cov.at("misclass/beta2");
  const double nm = mse.at("naive/beta1");
  const double mm = mse.at("misclass/beta1");
  o.check(nb >= -0.9 && nb <= -0.5, "naive bias(beta2) = " + fmt(nb) + " in [-0.90, -0.50]");
  o.check(std::abs(mb) < std::abs(nb),
          "misclass |bias(beta2)| = " + fmt(std::abs(mb)) + " < naive " + fmt(std::abs(nb)));
  o.check(nc <= 0.2, "naive coverage(beta2) = " + fmt(nc) + " <= 0.20");
  o.check(mc >= 0.85, "misclass coverage(beta2) = " + fmt(mc) + " >= 0.85");
  o.check(mm < nm, "misclass MSE(beta1) = " + fmt(mm) + " < naive " + fmt(nm));
  return o;
}

// ---- 5: model reduction -------------------------------------------------------

Outcome ac5() {
  Outcome o;
  ScenarioSpec spec;
  spec.n = 500;
  RngStream data_rng(505);
  const Dataset data = generate_dataset(spec, data_rng).data;
  const double eps = 0.01;
  const MisclassPrior prior(NaivePrior::scaled_identity(3, 10.0), {eps, 1e6}, {eps, 1e6});
  ChainConfig cfg;
  cfg.total_iterations = 25000;
  cfg.burn_in = 5000;
  cfg.p = 0.5;
  const RngStream base(506);
  const DrawStore naive =
      run_chains(ModelKind::kNaive, data, prior, cfg, 4, base.split({1}), 1);
  const DrawStore mis = run_chains(ModelKind::kMisclass, data, prior, cfg, 4, base.split({2}), 1,
                                   MisclassOptions{false, 5});
  for (std::size_t j = 0; j < 3; ++j) {
    // Chains are independent: the MC variance of the pooled mean is the mean
    // of per-chain batch-means variances over the chain count.
    auto mean_and_se = [&](const DrawStore& d) {
      double m = 0.0, v = 0.0;
      for (std::size_t c = 0; c < d.chains(); ++c) {
        const auto col = d.column(c, j);
        double cm = 0.0;
        for (double x : col) cm += x;
        m += cm / static_cast<double>(col.size());
        const double se = batch_means_se(col, 25);
        v += se * se;
      }
      const double k = static_cast<double>(d.chains());
      return std::pair{m / k, std::sqrt(v) / k};
    };
    const auto [m1, s1] = mean_and_se(naive);
    const auto [m2, s2] = mean_and_se(mis);
    const double se = std::hypot(s1, s2);
    o.check(std::abs(m1 - m2) < 2.0 * se, "beta" + std::to_string(j + 1) + ": naive " + fmt(m1) +
                                              ", misclass " + fmt(m2) + ", |diff| / MC SE = " +
                                              fmt(std::abs(m1 - m2) / se) + " < 2");
  }
  return o;
}

// ---- 6 and 7: CLI reruns and the stand-in application -------------------------

const fs::path kStandinConfig = fs::path(BQR_SOURCE_DIR) / "configs" / "fit_standin.json";

Outcome ac6() {
  Outcome o;
  for (const char* tag : {"fit_a", "fit_b"}) {
    const fs::path out = work_dir() / tag;
    fs::remove_all(out);
    const int rc = run_cli("fit --config \"" + kStandinConfig.string() + "\" --out \"" +
                               out.string() + "\"",
                           work_dir() / (std::string(tag) + ".log"));
    if (rc != 0) {
      o.check(false, std::string("bqr fit (") + tag + ") exited with status " + std::to_string(rc));
      return o;
    }
  }
  std::string detail;
  const bool fit_same = same_tree(work_dir() / "fit_a", work_dir() / "fit_b", detail);
  o.check(fit_same, "fit rerun: " + detail);

  const fs::path sim_b = work_dir() / "sim_b";
  fs::remove_all(sim_b);
  const int rc = run_cli("simulate --config \"" + kDeskConfig.string() + "\" --out \"" +
                             sim_b.string() + "\"",
                         work_dir() / "sim_b.log");
  if (rc != 0 || !fs::exists(work_dir() / "sim_a")) {
    o.check(false, "bqr simulate rerun did not complete");
    return o;
  }
  const bool sim_same = same_tree(work_dir() / "sim_a", sim_b, detail);
  o.check(sim_same, "simulate rerun: " + detail);
  return o;
}

Outcome ac7() {
  Outcome o;
  const CsvTable data = read_csv(fs::path(BQR_SOURCE_DIR) / "data" / "standin.csv");
  double prevalence = 0.0, age = 0.0;
  for (const auto& r : data.rows) {
    double v = 0.0;
    parse_double(r[data.column("vio")], v);
    prevalence += v;
    parse_double(r[data.column("fage")], v);
    age += v;
  }
  const double n = static_cast<double>(data.rows.size());
  prevalence /= n;
  age /= n;
  o.check(data.rows.size() == 20115 && std::abs(prevalence - 0.17) < 0.01 &&
              std::abs(age - 32.38) < 0.05,
          "stand-in data: n = " + std::to_string(data.rows.size()) + ", prevalence " +
              fmt(prevalence) + ", mean age " + fmt(age));

  const fs::path out = work_dir() / "fit_a";
  if (!fs::exists(out / "psrf.csv")) {
    o.check(false, "fit output missing (criterion 6 runs the fit)");
    return o;
  }
  const CsvTable psrf_t = read_csv(out / "psrf.csv");
  double worst = 0.0;
  std::string worst_name;
  for (const auto& r : psrf_t.rows) {
    const std::string name = r[psrf_t.column("parameter")];
    if (name.rfind("delta", 0) == 0) continue;
    double v = 0.0;
    parse_double(r[psrf_t.column("psrf")], v);
    if (!(v <= worst)) {
      worst = v;
      worst_name = name;
    }
  }
  o.check(worst < 1.1 && psrf_t.rows.size() == 11,
          "10000 iterations x 2 chains, max PSRF over beta = " + fmt(worst) + " (" + worst_name +
              ") < 1.1");

  const CsvTable s = read_csv(out / "summary.csv");
  std::map<std::string, std::vector<double>> est;
  for (const auto& r : s.rows) {
    std::vector<double> v(3);
    parse_double(r[s.column("mean")], v[0]);
    parse_double(r[s.column("lower")], v[1]);
    parse_double(r[s.column("upper")], v[2]);
    est[r[s.column("variable")]] = v;
  }
  const auto& d01 = est.at("delta01");
  const auto& d10 = est.at("delta10");
  o.check(d01[0] > 5.0 * d10[0] && d01[1] > d10[2],
          "E(delta01) = " + fmt(d01[0]) + " [" + fmt(d01[1]) + ", " + fmt(d01[2]) +
              "] >> E(delta10) = " + fmt(d10[0]) + " [" + fmt(d10[1]) + ", " + fmt(d10[2]) +
              "]: ratio > 5, intervals disjoint");
  return o;
}

}  // namespace

int main() {
  fs::create_directories(work_dir());
  struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "sampler joint-distribution checks", ac1},
      {"AC2", "kernel oracles", ac2},
      {"AC3", "conjugate misclassification update", ac3},
      {"AC4", "desk-scale simulation table", ac4},
      {"AC5", "model reduction with rates pinned at zero", ac5},
      {"AC6", "bit-identical reruns of fit and simulate", ac6},
      {"AC7", "stand-in application fit", ac7},
  };
  std::ofstream report(work_dir() / "report.txt");
  int unexpected = 0;
  std::vector<std::string> status;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = kKnownDeviations.count(c.id) > 0;
    std::string head = (o.pass ? "PASS " : "FAIL ") + c.id + " " + c.title + " (" + fmt(secs) + " s)";
    if (!o.pass && known) head += " [known deviation, see README]";
    if (!o.pass && !known) ++unexpected;
    report << head << "\n";
    for (const auto& l : o.lines) report << l << "\n";
    std::printf("%s\n", head.c_str());
    for (const auto& l : o.lines) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    status.push_back(head);
  }
  std::printf("\nSummary\n");
  for (const auto& s : status) std::printf("%s\n", s.c_str());
  return unexpected == 0 ? 0 : 1;
}
