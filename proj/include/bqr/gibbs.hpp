#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bqr/distributions.hpp"
#include "bqr/kernels.hpp"
#include "bqr/model.hpp"
#include "bqr/rng.hpp"

namespace bqr {

struct ChainConfig {
  long total_iterations = 0;
  long burn_in = 0;
  long thin = 1;
  double p = 0.5;
  // Start beta from a prior draw instead of beta0.
  bool overdispersed_start = false;

  // Throws InvalidConfig.
  void validate() const;
  IterationMeta meta() const { return {total_iterations, burn_in, thin}; }
};

// Reusable per-chain buffers so a sweep does not allocate.
struct SweepScratch {
  Vec eta;
  Vec c;
  Vec r;
  Vec tmp;

  void resize(std::size_t n);
};

// ---- single-site updates -------------------------------------------------

// beta | z, w ~ N(B (sum x_i (z_i - theta w_i) / (tau^2 w_i) + B0^{-1} beta0), B),
// B^{-1} = sum x_i x_i^T / (tau^2 w_i) + B0^{-1}.
Vec update_beta(const ChainState& state, const Dataset& data, const NaivePrior& prior,
                const QuantileSpec& spec, RngStream& rng,
                const kernels::KernelTable& kt = kernels::active());

// w_i | beta, z_i ~ GIG(1/2, ((z_i - x_i'beta) / tau)^2, theta^2 / tau^2 + 2).
Vec update_w(const ChainState& state, const Dataset& data, const QuantileSpec& spec,
             RngStream& rng, const kernels::KernelTable& kt = kernels::active());

// z_i | y_i, beta, w_i ~ N(x_i'beta + theta w_i, tau^2 w_i) truncated to the
// half-line matching y_i.
Vec update_z(const ChainState& state, const Dataset& data, const QuantileSpec& spec,
             RngStream& rng, const kernels::KernelTable& kt = kernels::active());

// z_i | y_i, beta with w integrated out: x_i'beta + e_i, e_i ~ AL(0, 1, p)
// truncated to the half-line matching y_i.
Vec update_z_collapsed(const ChainState& state, const Dataset& data, const QuantileSpec& spec,
                       RngStream& rng, const kernels::KernelTable& kt = kernels::active());

// Four cells of the (true y, observed y) cross-tabulation.
struct ConfusionCounts {
  std::int64_t true1_obs1 = 0;
  std::int64_t true1_obs0 = 0;
  std::int64_t true0_obs1 = 0;
  std::int64_t true0_obs0 = 0;
};

ConfusionCounts confusion_counts(const std::vector<std::uint8_t>& y,
                                 const std::vector<std::uint8_t>& y_obs);

struct DeltaPosterior {
  BetaPrior delta01;
  BetaPrior delta10;
};

DeltaPosterior delta_posterior(const std::vector<std::uint8_t>& y,
                               const std::vector<std::uint8_t>& y_obs,
                               const MisclassPrior& prior);

// (delta01, delta10) drawn from their Beta full conditionals. With
// `identifiable` set, pairs with delta01 + delta10 >= 1 are rejected.
std::pair<double, double> update_deltas(const ChainState& state, const Dataset& data,
                                        const MisclassPrior& prior, RngStream& rng,
                                        bool identifiable = false);

// y_i ~ Bernoulli(Psi_i) with (z, w) integrated out.
std::vector<std::uint8_t> update_y(const ChainState& state, const Dataset& data,
                                   const MisclassPrior& prior, const QuantileSpec& spec,
                                   RngStream& rng,
                                   const kernels::KernelTable& kt = kernels::active());

// ---- samplers -------------------------------------------------------------

// Binary quantile regression without misclassification. The sampler reads
// the dataset through a reference; the caller keeps it alive.
class NaiveSampler {
 public:
  NaiveSampler(const Dataset& data, NaivePrior prior, double p,
               const kernels::KernelTable& kt = kernels::active());

  // beta = beta0 (or a prior draw), w = 1, z from its truncated normal.
  void initialize(RngStream& rng, bool overdispersed = false);
  // One pass of the beta, w, z updates.
  void sweep(RngStream& rng);

  ChainState& state() noexcept { return state_; }
  const ChainState& state() const noexcept { return state_; }
  const QuantileSpec& spec() const noexcept { return spec_; }

 private:
  const Dataset& data_;
  NaivePrior prior_;
  QuantileSpec spec_;
  const kernels::KernelTable& kt_;
  ChainState state_;
  SweepScratch scratch_;
};

struct MisclassOptions {
  bool identifiable = false;
  // Random-walk Metropolis moves per sweep on (beta, logit delta01,
  // logit delta10) against the observed-data posterior, made just before the
  // joint (y, z, w) draw. They let the chain cross the ridge between the
  // intercept, the coefficient scale and the deltas that the Gibbs steps
  // traverse slowly when n is large. 0 gives the plain Gibbs sweep.
  int joint_moves = 0;
};

// Binary quantile regression with misclassified outcomes. Sweep order:
// beta | z, w; delta01, delta10 | y; then (y, z, w) jointly given beta and
// the deltas: y with (z, w) integrated out, z with w integrated out, and w
// from its GIG conditional. Once y has been drawn marginally, z must not be
// drawn given the w left over from the previous z, since that pair is no
// longer a draw from its joint conditional.
class MisclassSampler {
 public:
  MisclassSampler(const Dataset& data, MisclassPrior prior, double p, MisclassOptions options = {},
                  const kernels::KernelTable& kt = kernels::active());

  // y = y_obs, deltas from their priors, then as NaiveSampler.
  void initialize(RngStream& rng, bool overdispersed = false);
  void sweep(RngStream& rng);

  // Fixed proposal covariance for the joint moves, in the coordinates
  // (beta, logit delta01, logit delta10).
  void set_proposal(const SquareMatrix& covariance);
  // While adapting, every sweep feeds a running covariance estimate that
  // periodically replaces the proposal, and the step scale is tuned toward
  // an acceptance rate of 0.234. Switch off before retaining draws.
  void set_adapting(bool on);
  bool adapting() const noexcept { return adapting_; }
  bool has_proposal() const noexcept { return has_proposal_; }
  // Accepted / attempted joint moves since the last call to set_adapting.
  double acceptance_rate() const noexcept;

  // Unnormalized log posterior of (beta, logit delta01, logit delta10) given
  // y_obs, with the latents integrated out.
  double log_joint_target(std::span<const double> phi);

  ChainState& state() noexcept { return state_; }
  const ChainState& state() const noexcept { return state_; }
  const QuantileSpec& spec() const noexcept { return spec_; }

 private:
  void joint_moves(RngStream& rng);
  void record_for_adaptation();

  const Dataset& data_;
  MisclassPrior prior_;
  QuantileSpec spec_;
  MisclassOptions options_;
  const kernels::KernelTable& kt_;
  ChainState state_;
  SweepScratch scratch_;

  bool has_proposal_ = false;
  bool adapting_ = false;
  SquareMatrix proposal_chol_;
  double log_scale_ = 0.0;
  long attempted_ = 0;
  long accepted_ = 0;
  long adapt_count_ = 0;
  Vec adapt_mean_;
  SquareMatrix adapt_m2_;
};

// ---- chain drivers --------------------------------------------------------

DrawStore run_naive_chain(const Dataset& data, const NaivePrior& prior, const ChainConfig& cfg,
                          RngStream& rng);
DrawStore run_misclass_chain(const Dataset& data, const MisclassPrior& prior,
                             const ChainConfig& cfg, RngStream& rng,
                             MisclassOptions options = {});

enum class ModelKind { kNaive, kMisclass };

const char* model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);

// Runs `chains` independent chains on a worker pool; chain c draws from
// base.split({c}). Chains are merged in index order.
DrawStore run_chains(ModelKind kind, const Dataset& data, const MisclassPrior& prior,
                     const ChainConfig& cfg, std::size_t chains, const RngStream& base,
                     std::size_t workers = 0, MisclassOptions options = {});

// Parameter labels for a draw store: column names, then the deltas.
std::vector<std::string> parameter_names(const Dataset& data, ModelKind kind);

}  // namespace bqr
