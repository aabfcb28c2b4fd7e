#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bqr/design.hpp"
#include "bqr/linalg.hpp"

namespace bqr {

// Design matrix (first column the intercept) plus observed binary outcomes.
class Dataset {
 public:
  Dataset() = default;
  Dataset(DesignMatrix x, std::vector<std::uint8_t> y_obs, std::vector<std::string> column_names);

  std::size_t n() const noexcept { return x_.rows(); }
  std::size_t k() const noexcept { return x_.cols(); }
  const DesignMatrix& x() const noexcept { return x_; }
  const std::vector<std::uint8_t>& y_obs() const noexcept { return y_obs_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  // Outcomes may be replaced wholesale (simulation, joint-distribution
  // tests); the replacement is validated like the original.
  void set_y_obs(std::vector<std::uint8_t> y_obs);

 private:
  DesignMatrix x_;
  std::vector<std::uint8_t> y_obs_;
  std::vector<std::string> names_;
};

// beta ~ N(beta0, B0). Stored as the prior precision B0^{-1} and the
// product B0^{-1} beta0, which is all the beta update needs. A zero
// precision gives the flat (improper) limit.
class NaivePrior {
 public:
  static NaivePrior from_covariance(Vec beta0, const SpdMatrix& b0);
  static NaivePrior from_precision(Vec beta0, SquareMatrix precision);
  // N(mean * 1, scale * I)
  static NaivePrior scaled_identity(std::size_t k, double scale, double mean = 0.0);

  std::size_t k() const noexcept { return beta0_.size(); }
  const Vec& beta0() const noexcept { return beta0_; }
  const SquareMatrix& precision() const noexcept { return precision_; }
  const Vec& precision_mean() const noexcept { return precision_mean_; }
  bool proper() const noexcept { return proper_; }

 private:
  NaivePrior(Vec beta0, SquareMatrix precision, bool proper);

  Vec beta0_;
  SquareMatrix precision_;
  Vec precision_mean_;
  bool proper_;
};

struct BetaPrior {
  double a;
  double b;

  double mean() const noexcept { return a / (a + b); }
  double variance() const noexcept { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }
};

// beta prior plus delta01 ~ Beta(kappa1, kappa2), delta10 ~ Beta(kappa3, kappa4).
struct MisclassPrior {
  NaivePrior beta;
  BetaPrior delta01;
  BetaPrior delta10;

  MisclassPrior(NaivePrior beta_prior, BetaPrior d01, BetaPrior d10);
};

// Full augmented state of one chain. In the naive model y mirrors y_obs and
// the deltas stay at zero.
struct ChainState {
  Vec beta;
  Vec w;
  Vec z;
  std::vector<std::uint8_t> y;
  double delta01 = 0.0;
  double delta10 = 0.0;

  // z_i > 0 exactly when y_i = 1, and every w_i > 0.
  bool consistent() const noexcept;
};

struct IterationMeta {
  long total = 0;
  long burn_in = 0;
  long thin = 1;

  long retained() const noexcept { return thin > 0 ? (total - burn_in) / thin : 0; }
};

// Retained draws, one row per kept iteration, one block per chain.
class DrawStore {
 public:
  DrawStore() = default;
  DrawStore(std::vector<std::string> names, IterationMeta meta);

  const std::vector<std::string>& names() const noexcept { return names_; }
  const IterationMeta& meta() const noexcept { return meta_; }
  std::size_t parameters() const noexcept { return names_.size(); }
  std::size_t chains() const noexcept { return chains_.size(); }
  std::size_t draws_per_chain() const;

  std::size_t add_chain();
  void append(std::size_t chain, std::span<const double> row);

  std::size_t index_of(const std::string& name) const;
  std::vector<double> column(std::size_t chain, std::size_t param) const;
  std::vector<double> column(std::size_t chain, const std::string& name) const {
    return column(chain, index_of(name));
  }
  std::span<const double> row(std::size_t chain, std::size_t draw) const;

  // Appends the chains of `other` (same names) after this store's chains.
  void absorb(const DrawStore& other);
  // Throws unless every chain holds the same number of draws.
  void check_balanced() const;

 private:
  std::vector<std::string> names_;
  IterationMeta meta_;
  std::vector<std::vector<double>> chains_;
};

// Pr(y = 1) = 1 - F_AL(-x'beta).
double success_prob(std::span<const double> x, std::span<const double> beta, double p);
double success_prob_from_eta(double eta, double p);

// Log-likelihood of y_obs with the deltas marginalized out of the latent y.
double observed_loglik(const Dataset& data, std::span<const double> beta, double d01,
                       double d10, double p);

// Pr(y_i = 1 | beta, deltas, y_obs_i).
double latent_y_prob(std::span<const double> x, std::span<const double> beta, double p,
                     double d01, double d10, std::uint8_t y_obs_i);
double latent_y_prob_from_eta(double eta, double p, double d01, double d10, std::uint8_t y_obs_i);

}  // namespace bqr
