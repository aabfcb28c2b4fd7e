#include <algorithm>
#include <cmath>
#include <limits>

#include "bqr/errors.hpp"
#include "bqr/gibbs.hpp"
#include "gibbs_detail.hpp"

namespace bqr {

namespace {

// Joint moves start once this many sweeps have fed the covariance estimate,
// and the proposal is refreshed at this interval while adapting.
constexpr long kAdaptWarmup = 200;
constexpr long kAdaptRefresh = 100;
constexpr double kTargetAcceptance = 0.234;

double log_logistic(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double logistic(double x) { return std::exp(log_logistic(x)); }

double logit(double d) { return std::log(d) - std::log1p(-d); }

void draw_y(ChainState& state, const Dataset& data, const QuantileSpec& spec, RngStream& rng,
            const kernels::KernelTable& kt, SweepScratch& s) {
  const std::size_t n = data.n();
  kernels::linear_predictor(kt, data.x(), state.beta, std::span<double>(s.eta.data(), n));
  const auto& y_obs = data.y_obs();
  state.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double prob =
        latent_y_prob_from_eta(s.eta[i], spec.p, state.delta01, state.delta10, y_obs[i]);
    state.y[i] = rng.uniform() < prob ? 1 : 0;
  }
}

}  // namespace

ConfusionCounts confusion_counts(const std::vector<std::uint8_t>& y,
                                 const std::vector<std::uint8_t>& y_obs) {
  if (y.size() != y_obs.size()) throw DimensionMismatch("confusion_counts: lengths differ");
  // Single pass: index the cell by 2*y + y_obs.
  std::int64_t cells[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < y.size(); ++i) ++cells[2 * y[i] + y_obs[i]];
  ConfusionCounts c;
  c.true0_obs0 = cells[0];
  c.true0_obs1 = cells[1];
  c.true1_obs0 = cells[2];
  c.true1_obs1 = cells[3];
  return c;
}

DeltaPosterior delta_posterior(const std::vector<std::uint8_t>& y,
                               const std::vector<std::uint8_t>& y_obs,
                               const MisclassPrior& prior) {
  const ConfusionCounts c = confusion_counts(y, y_obs);
  return DeltaPosterior{
      BetaPrior{static_cast<double>(c.true1_obs0) + prior.delta01.a,
                static_cast<double>(c.true1_obs1) + prior.delta01.b},
      BetaPrior{static_cast<double>(c.true0_obs1) + prior.delta10.a,
                static_cast<double>(c.true0_obs0) + prior.delta10.b},
  };
}

std::pair<double, double> update_deltas(const ChainState& state, const Dataset& data,
                                        const MisclassPrior& prior, RngStream& rng,
                                        bool identifiable) {
  const DeltaPosterior post = delta_posterior(state.y, data.y_obs(), prior);
  for (;;) {
    const double d01 = draw::beta(post.delta01.a, post.delta01.b, rng);
    const double d10 = draw::beta(post.delta10.a, post.delta10.b, rng);
    if (!identifiable || d01 + d10 < 1.0) return {d01, d10};
  }
}

std::vector<std::uint8_t> update_y(const ChainState& state, const Dataset& data,
                                   const MisclassPrior& prior, const QuantileSpec& spec,
                                   RngStream& rng, const kernels::KernelTable& kt) {
  if (prior.beta.k() != data.k()) throw DimensionMismatch("update_y: prior dimension");
  SweepScratch s;
  s.resize(data.n());
  ChainState next = state;
  draw_y(next, data, spec, rng, kt, s);
  return next.y;
}

MisclassSampler::MisclassSampler(const Dataset& data, MisclassPrior prior, double p,
                                 MisclassOptions options, const kernels::KernelTable& kt)
    : data_(data), prior_(std::move(prior)), spec_(al_constants(p)), options_(options), kt_(kt) {
  if (prior_.beta.k() != data_.k()) throw DimensionMismatch("MisclassSampler: prior dimension");
  scratch_.resize(data_.n());
}

void MisclassSampler::initialize(RngStream& rng, bool overdispersed) {
  state_.y = data_.y_obs();
  for (;;) {
    state_.delta01 = draw::beta(prior_.delta01.a, prior_.delta01.b, rng);
    state_.delta10 = draw::beta(prior_.delta10.a, prior_.delta10.b, rng);
    if (!options_.identifiable || state_.delta01 + state_.delta10 < 1.0) break;
  }
  detail::init_common(state_, data_, prior_.beta, spec_, rng, overdispersed, kt_, scratch_);
}

void MisclassSampler::sweep(RngStream& rng) {
  scratch_.resize(data_.n());
  detail::draw_beta(state_, data_, prior_.beta, spec_, rng, kt_, scratch_, state_.beta);
  const auto [d01, d10] = update_deltas(state_, data_, prior_, rng, options_.identifiable);
  state_.delta01 = d01;
  state_.delta10 = d10;
  if (options_.joint_moves > 0) {
    if (has_proposal_) joint_moves(rng);
    if (adapting_) record_for_adaptation();
  }
  draw_y(state_, data_, spec_, rng, kt_, scratch_);
  detail::draw_z_collapsed(state_, data_, spec_, rng, kt_, scratch_);
  detail::draw_w(state_, data_, spec_, rng, kt_, scratch_);
}

double MisclassSampler::log_joint_target(std::span<const double> phi) {
  const std::size_t k = data_.k();
  if (phi.size() != k + 2) throw DimensionMismatch("log_joint_target: expected k + 2 values");
  const double lx01 = phi[k];
  const double lx10 = phi[k + 1];
  const double d01 = logistic(lx01);
  const double d10 = logistic(lx10);
  if (!(d01 > 0.0 && d01 < 1.0 && d10 > 0.0 && d10 < 1.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  if (options_.identifiable && d01 + d10 >= 1.0) return -std::numeric_limits<double>::infinity();

  const std::size_t n = data_.n();
  scratch_.resize(n);
  kernels::linear_predictor(kt_, data_.x(), phi.first(k), std::span<double>(scratch_.eta.data(), n));
  const auto& y_obs = data_.y_obs();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = al_cdf(-scratch_.eta[i], spec_.p);
    const double sf = al_survival(-scratch_.eta[i], spec_.p);
    // Pr(y_obs = 1) = d10 F + (1 - d01) (1 - F), F = F_AL(-x'beta).
    const double prob = y_obs[i] == 1 ? d10 * cdf + (1.0 - d01) * sf : (1.0 - d10) * cdf + d01 * sf;
    total += std::log(prob);
  }

  // beta prior, up to a constant: -b'Pb/2 + b'(P beta0).
  const SquareMatrix& prec = prior_.beta.precision();
  const Vec& pm = prior_.beta.precision_mean();
  for (std::size_t a = 0; a < k; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < k; ++b) row += prec(a, b) * phi[b];
    total += -0.5 * phi[a] * row + phi[a] * pm[a];
  }
  // Beta priors with the logit Jacobian: d^a (1 - d)^b.
  total += prior_.delta01.a * log_logistic(lx01) + prior_.delta01.b * log_logistic(-lx01);
  total += prior_.delta10.a * log_logistic(lx10) + prior_.delta10.b * log_logistic(-lx10);
  return std::isnan(total) ? -std::numeric_limits<double>::infinity() : total;
}

void MisclassSampler::set_proposal(const SquareMatrix& covariance) {
  if (covariance.dim() != data_.k() + 2) {
    throw DimensionMismatch("set_proposal: covariance must be (k + 2) x (k + 2)");
  }
  proposal_chol_ = chol_factor(SpdMatrix(covariance)).matrix();
  has_proposal_ = true;
}

void MisclassSampler::set_adapting(bool on) {
  adapting_ = on;
  attempted_ = 0;
  accepted_ = 0;
}

double MisclassSampler::acceptance_rate() const noexcept {
  return attempted_ > 0 ? static_cast<double>(accepted_) / static_cast<double>(attempted_) : 0.0;
}

void MisclassSampler::joint_moves(RngStream& rng) {
  const std::size_t k = data_.k();
  const std::size_t d = k + 2;
  Vec phi(state_.beta);
  phi.push_back(logit(state_.delta01));
  phi.push_back(logit(state_.delta10));
  double current = log_joint_target(phi);
  // Deltas drawn at exactly 0 or 1 (degenerate priors) have no logit.
  if (!std::isfinite(current)) return;
  const double scale = std::exp(log_scale_);
  Vec eps(d);
  Vec proposal(d);
  for (int m = 0; m < options_.joint_moves; ++m) {
    for (double& e : eps) e = draw::std_normal(rng);
    for (std::size_t a = 0; a < d; ++a) {
      double step = 0.0;
      for (std::size_t b = 0; b <= a; ++b) step += proposal_chol_(a, b) * eps[b];
      proposal[a] = phi[a] + scale * step;
    }
    const double candidate = log_joint_target(proposal);
    const double log_ratio = candidate - current;
    const bool accept = std::log(rng.uniform_open()) < log_ratio;
    ++attempted_;
    if (accept) {
      ++accepted_;
      phi.swap(proposal);
      current = candidate;
    }
    if (adapting_) {
      const double alpha = std::isnan(log_ratio) ? 0.0 : std::min(1.0, std::exp(log_ratio));
      log_scale_ += (alpha - kTargetAcceptance) / std::sqrt(static_cast<double>(attempted_));
      log_scale_ = std::clamp(log_scale_, -10.0, 3.0);
    }
  }
  std::copy(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(k), state_.beta.begin());
  state_.delta01 = logistic(phi[k]);
  state_.delta10 = logistic(phi[k + 1]);
}

void MisclassSampler::record_for_adaptation() {
  const std::size_t k = data_.k();
  const std::size_t d = k + 2;
  Vec phi(state_.beta);
  phi.push_back(logit(state_.delta01));
  phi.push_back(logit(state_.delta10));
  for (double v : phi) {
    if (!std::isfinite(v)) return;
  }
  if (adapt_mean_.size() != d) {
    adapt_mean_.assign(d, 0.0);
    adapt_m2_ = SquareMatrix(d);
    adapt_count_ = 0;
  }
  // Welford update of the running mean and scatter matrix.
  ++adapt_count_;
  Vec delta(d);
  for (std::size_t a = 0; a < d; ++a) {
    delta[a] = phi[a] - adapt_mean_[a];
    adapt_mean_[a] += delta[a] / static_cast<double>(adapt_count_);
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) adapt_m2_(a, b) += delta[a] * (phi[b] - adapt_mean_[b]);
  }
  if (adapt_count_ >= kAdaptWarmup && adapt_count_ % kAdaptRefresh == 0) {
    SquareMatrix cov = adapt_m2_;
    const double denom = static_cast<double>(adapt_count_ - 1);
    const double base = 2.38 * 2.38 / static_cast<double>(d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov(a, b) *= base / denom;
      cov(a, a) += 1e-10;
    }
    try {
      set_proposal(cov);
    } catch (const NotPositiveDefinite&) {
      // Keep the previous proposal; the estimate is degenerate this early.
    }
  }
}

}  // namespace bqr
