#include "bqr/model.hpp"

#include <algorithm>
#include <cmath>

#include "bqr/distributions.hpp"
#include "bqr/errors.hpp"

namespace bqr {

namespace {

void validate_outcomes(const std::vector<std::uint8_t>& y, std::size_t n) {
  if (y.size() != n) throw DimensionMismatch("Dataset: outcome length differs from rows");
  for (std::uint8_t v : y) {
    if (v > 1) throw NonBinaryOutcome("Dataset: outcomes must be 0 or 1");
  }
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -kInf) return -kInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -kInf; }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("covariate and coefficient lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

Dataset::Dataset(DesignMatrix x, std::vector<std::uint8_t> y_obs,
                 std::vector<std::string> column_names)
    : x_(std::move(x)), y_obs_(std::move(y_obs)), names_(std::move(column_names)) {
  if (x_.cols() == 0) throw DomainError("Dataset: need at least the intercept column");
  if (names_.empty()) {
    names_.push_back("(Intercept)");
    for (std::size_t j = 1; j < x_.cols(); ++j) names_.push_back("x" + std::to_string(j));
  }
  if (names_.size() != x_.cols()) throw DimensionMismatch("Dataset: column name count");
  validate_outcomes(y_obs_, x_.rows());
  for (std::size_t j = 0; j < x_.cols(); ++j) {
    for (double v : x_.column(j)) {
      if (!std::isfinite(v)) throw NonFinite("Dataset: non-finite covariate value");
    }
  }
  for (double v : x_.column(0)) {
    if (v != 1.0) throw DomainError("Dataset: first column must be the intercept (all ones)");
  }
}

void Dataset::set_y_obs(std::vector<std::uint8_t> y_obs) {
  validate_outcomes(y_obs, n());
  y_obs_ = std::move(y_obs);
}

NaivePrior::NaivePrior(Vec beta0, SquareMatrix precision, bool proper)
    : beta0_(std::move(beta0)), precision_(std::move(precision)), proper_(proper) {
  if (precision_.dim() != beta0_.size()) throw DimensionMismatch("NaivePrior dimensions");
  precision_mean_ = precision_ * std::span<const double>(beta0_);
}

NaivePrior NaivePrior::from_covariance(Vec beta0, const SpdMatrix& b0) {
  return NaivePrior(std::move(beta0), chol_factor(b0).inverse(), true);
}

NaivePrior NaivePrior::from_precision(Vec beta0, SquareMatrix precision) {
  bool proper = true;
  try {
    chol_factor(SpdMatrix(precision));
  } catch (const NotPositiveDefinite&) {
    proper = false;
  }
  return NaivePrior(std::move(beta0), std::move(precision), proper);
}

NaivePrior NaivePrior::scaled_identity(std::size_t k, double scale, double mean) {
  if (!(scale > 0.0)) throw DomainError("NaivePrior: prior variance scale must be positive");
  SquareMatrix prec(k);
  for (std::size_t j = 0; j < k; ++j) prec(j, j) = 1.0 / scale;
  return NaivePrior(Vec(k, mean), std::move(prec), true);
}

MisclassPrior::MisclassPrior(NaivePrior beta_prior, BetaPrior d01, BetaPrior d10)
    : beta(std::move(beta_prior)), delta01(d01), delta10(d10) {
  for (double kappa : {d01.a, d01.b, d10.a, d10.b}) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
      throw DomainError("MisclassPrior: Beta hyperparameters must be positive");
    }
  }
}

bool ChainState::consistent() const noexcept {
  if (z.size() != y.size() || w.size() != y.size()) return false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((z[i] > 0.0) != (y[i] == 1)) return false;
    if (!(w[i] > 0.0)) return false;
  }
  return true;
}

DrawStore::DrawStore(std::vector<std::string> names, IterationMeta meta)
    : names_(std::move(names)), meta_(meta) {}

std::size_t DrawStore::draws_per_chain() const {
  if (chains_.empty() || names_.empty()) return 0;
  return chains_.front().size() / names_.size();
}

std::size_t DrawStore::add_chain() {
  chains_.emplace_back();
  if (meta_.retained() > 0) {
    chains_.back().reserve(static_cast<std::size_t>(meta_.retained()) * names_.size());
  }
  return chains_.size() - 1;
}

void DrawStore::append(std::size_t chain, std::span<const double> row) {
  if (row.size() != names_.size()) throw DimensionMismatch("DrawStore::append row width");
  auto& c = chains_.at(chain);
  c.insert(c.end(), row.begin(), row.end());
}

std::size_t DrawStore::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw MissingColumn("no parameter named '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> DrawStore::column(std::size_t chain, std::size_t param) const {
  const auto& c = chains_.at(chain);
  const std::size_t width = names_.size();
  if (param >= width) throw DimensionMismatch("DrawStore::column index");
  std::vector<double> out;
  out.reserve(c.size() / width);
  for (std::size_t i = param; i < c.size(); i += width) out.push_back(c[i]);
  return out;
}

std::span<const double> DrawStore::row(std::size_t chain, std::size_t draw) const {
  const auto& c = chains_.at(chain);
  const std::size_t width = names_.size();
  return {c.data() + draw * width, width};
}

void DrawStore::absorb(const DrawStore& other) {
  if (other.names_ != names_) throw DimensionMismatch("DrawStore::absorb parameter names");
  chains_.insert(chains_.end(), other.chains_.begin(), other.chains_.end());
}

void DrawStore::check_balanced() const {
  for (const auto& c : chains_) {
    if (c.size() != chains_.front().size()) {
      throw DimensionMismatch("DrawStore: chains hold different numbers of draws");
    }
  }
}

double success_prob_from_eta(double eta, double p) { return al_survival(-eta, p); }

double success_prob(std::span<const double> x, std::span<const double> beta, double p) {
  return success_prob_from_eta(dot(x, beta), p);
}

double latent_y_prob_from_eta(double eta, double p, double d01, double d10,
                              std::uint8_t y_obs_i) {
  if (!(d01 >= 0.0 && d01 <= 1.0) || !(d10 >= 0.0 && d10 <= 1.0)) {
    throw DomainError("latent_y_prob: misclassification rates must lie in [0,1]");
  }
  const double psi = al_survival(-eta, p);
  const double cdf = al_cdf(-eta, p);
  const double a = y_obs_i == 1 ? 1.0 - d01 : d01;
  const double b = y_obs_i == 1 ? d10 : 1.0 - d10;
  const double num = a * psi;
  const double den = num + b * cdf;
  if (!(den > 0.0)) {
    throw DomainError("latent_y_prob: both latent outcomes have zero probability");
  }
  return num / den;
}

double latent_y_prob(std::span<const double> x, std::span<const double> beta, double p,
                     double d01, double d10, std::uint8_t y_obs_i) {
  return latent_y_prob_from_eta(dot(x, beta), p, d01, d10, y_obs_i);
}

double observed_loglik(const Dataset& data, std::span<const double> beta, double d01,
                       double d10, double p) {
  if (beta.size() != data.k()) throw DimensionMismatch("observed_loglik: beta length");
  if (!(d01 >= 0.0 && d01 <= 1.0) || !(d10 >= 0.0 && d10 <= 1.0)) {
    throw DomainError("observed_loglik: misclassification rates must lie in [0,1]");
  }
  const double log_d01 = safe_log(d01);
  const double log_1m_d01 = safe_log(1.0 - d01);
  const double log_d10 = safe_log(d10);
  const double log_1m_d10 = safe_log(1.0 - d10);
  const DesignMatrix& x = data.x();
  double total = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < data.k(); ++j) eta += x(i, j) * beta[j];
    const double log_cdf = al_log_cdf(-eta, p);
    const double log_sf = al_log_survival(-eta, p);
    const double term = data.y_obs()[i] == 1 ? log_sum_exp(log_d10 + log_cdf, log_1m_d01 + log_sf)
                                             : log_sum_exp(log_1m_d10 + log_cdf, log_d01 + log_sf);
    if (!std::isfinite(term)) {
      throw NonFinite("observed_loglik: observation " + std::to_string(i) +
                      " has zero probability");
    }
    total += term;
  }
  return total;
}

}  // namespace bqr
