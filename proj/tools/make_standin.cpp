// Writes the synthetic stand-in for the restricted survey extract: same
// variable schema and marginal means/sds, outcome generated from the
// misclassification model at the median.
//
//   make_standin <out.csv> [truth.csv] [seed]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "bqr/csv.hpp"
#include "bqr/distributions.hpp"
#include "bqr/model.hpp"
#include "bqr/rng.hpp"

namespace {

constexpr std::size_t kRows = 20115;
constexpr double kQuantile = 0.5;
constexpr double kDelta01 = 0.62;
constexpr double kDelta10 = 0.01;
constexpr double kObservedPrevalence = 0.17;

struct Column {
  const char* name;
  bool continuous;
  double coef;  // on the standardized scale for continuous columns
};

// Outcome model coefficients; the intercept is solved for below.
const std::vector<Column> kColumns = {
    {"fage", true, -0.23},      {"fwork", false, 0.22},      {"meduc", true, -0.30},
    {"wealth", true, -0.74},    {"nchildren", true, 0.27},   {"remarriage", false, 0.37},
    {"polyg", false, 1.45},     {"nwomen", true, -0.04},
};

// Affine map so the sample has exactly the target mean and sd.
void match_moments(std::vector<double>& v, double mean, double sd) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double s = std::sqrt(ss / static_cast<double>(v.size() - 1));
  for (double& x : v) x = mean + sd * (x - m) / s;
}

std::vector<double> standardized(const std::vector<double>& v) {
  std::vector<double> out = v;
  match_moments(out, 0.0, 1.0);
  return out;
}

double mean_success(const std::vector<double>& eta_no_icpt, double intercept) {
  double acc = 0.0;
  for (double e : eta_no_icpt) acc += bqr::success_prob_from_eta(e + intercept, kQuantile);
  return acc / static_cast<double>(eta_no_icpt.size());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: make_standin <out.csv> [truth.csv] [seed]\n");
    return 2;
  }
  const std::string out_path = argv[1];
  const std::string truth_path = argc > 2 ? argv[2] : "";
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 20115;

  bqr::RngStream rng(seed, {static_cast<std::uint64_t>(bqr::StreamPurpose::kData)});
  namespace draw = bqr::draw;

  std::vector<double> fage(kRows), fwork(kRows), meduc(kRows), wealth(kRows), nchildren(kRows),
      remarriage(kRows), polyg(kRows), nwomen(kRows);
  for (auto& v : fage) v = draw::std_normal(rng);
  match_moments(fage, 32.38, 7.71);
  for (auto& v : fage) v = std::clamp(std::round(v), 15.0, 60.0);
  for (auto& v : fwork) v = draw::bernoulli(0.28, rng) ? 1.0 : 0.0;
  for (auto& v : meduc) v = draw::std_normal(rng);
  match_moments(meduc, 9.23, 5.10);
  for (auto& v : meduc) v = std::clamp(std::round(v), 0.0, 22.0);
  for (auto& v : wealth) v = draw::std_normal(rng);
  match_moments(wealth, 0.71, 0.83);
  for (auto& v : wealth) v = std::round(v * 1e5) / 1e5;
  // Counts: binomials whose mean and variance match the table.
  for (auto& v : nchildren) v = static_cast<double>(draw::binomial(20, 0.11, rng));
  for (auto& v : remarriage) v = draw::bernoulli(0.02, rng) ? 1.0 : 0.0;
  for (auto& v : polyg) v = draw::bernoulli(0.01, rng) ? 1.0 : 0.0;
  for (auto& v : nwomen) v = static_cast<double>(draw::binomial(3, 0.53, rng));

  const std::vector<std::vector<double>*> raw = {&fage,       &fwork,      &meduc, &wealth,
                                                 &nchildren,  &remarriage, &polyg, &nwomen};
  std::vector<double> eta(kRows, 0.0);
  for (std::size_t j = 0; j < kColumns.size(); ++j) {
    const std::vector<double> x = kColumns[j].continuous ? standardized(*raw[j]) : *raw[j];
    for (std::size_t i = 0; i < kRows; ++i) eta[i] += kColumns[j].coef * x[i];
  }

  // Pr(y_obs = 1) = (1 - d01) Pr(y = 1) + d10 (1 - Pr(y = 1)).
  const double target = (kObservedPrevalence - kDelta10) / (1.0 - kDelta01 - kDelta10);
  double lo = -10.0;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_success(eta, mid) < target ? lo : hi) = mid;
  }
  const double intercept = 0.5 * (lo + hi);

  const bqr::QuantileSpec al = bqr::al_constants(kQuantile);
  std::vector<int> vio(kRows);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < kRows; ++i) {
    const bool y = intercept + eta[i] + bqr::al_sample(al, rng) > 0.0;
    const double u = rng.uniform();
    vio[i] = y ? (u < 1.0 - kDelta01) : (u < kDelta10);
    positives += static_cast<std::size_t>(vio[i]);
  }

  bqr::CsvWriter w(out_path);
  w.row({"vio", "fage", "fwork", "meduc", "wealth", "nchildren", "remarriage", "polyg", "nwomen"});
  char buf[32];
  for (std::size_t i = 0; i < kRows; ++i) {
    std::snprintf(buf, sizeof buf, "%.5f", wealth[i]);
    w.row({std::to_string(vio[i]), std::to_string(static_cast<int>(fage[i])),
           std::to_string(static_cast<int>(fwork[i])), std::to_string(static_cast<int>(meduc[i])),
           buf, std::to_string(static_cast<int>(nchildren[i])),
           std::to_string(static_cast<int>(remarriage[i])),
           std::to_string(static_cast<int>(polyg[i])), std::to_string(static_cast<int>(nwomen[i]))});
  }
  w.close();

  if (!truth_path.empty()) {
    bqr::CsvWriter t(truth_path);
    t.row({"parameter", "value"});
    t.row({"(Intercept)", bqr::format_double(intercept)});
    for (const auto& c : kColumns) t.row({c.name, bqr::format_double(c.coef)});
    t.row({"delta01", bqr::format_double(kDelta01)});
    t.row({"delta10", bqr::format_double(kDelta10)});
    t.close();
  }
  std::fprintf(stderr, "wrote %zu rows, observed prevalence %.4f, intercept %.4f\n", kRows,
               static_cast<double>(positives) / static_cast<double>(kRows), intercept);
  return 0;
}
