#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "bqr/errors.hpp"
#include "bqr/gibbs.hpp"
#include "gibbs_detail.hpp"
#include "bqr/parallel.hpp"

namespace bqr {

namespace {

constexpr double kWeightFloor = 1e-300;

}  // namespace

void ChainConfig::validate() const {
  if (total_iterations <= 0) throw InvalidConfig("total iterations must be positive");
  if (burn_in < 0) throw InvalidConfig("burn-in must be non-negative");
  if (burn_in >= total_iterations) throw InvalidConfig("burn-in must be below total iterations");
  if (thin <= 0) throw InvalidConfig("thinning interval must be positive");
  if (!(p > 0.0 && p < 1.0)) throw InvalidConfig("quantile must lie in (0,1)");
}

void SweepScratch::resize(std::size_t n) {
  eta.resize(n);
  c.resize(n);
  r.resize(n);
  tmp.resize(n);
}

std::size_t worker_count(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    n = hw > 0 ? hw : 1;
  }
  if (const char* env = std::getenv("BQR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && static_cast<std::size_t>(cap) < n) n = static_cast<std::size_t>(cap);
  }
  return n;
}

namespace detail {

void draw_beta(const ChainState& state, const Dataset& data, const NaivePrior& prior,
               const QuantileSpec& spec, RngStream& rng, const kernels::KernelTable& kt,
               SweepScratch& s, Vec& out) {
  const std::size_t n = data.n();
  const std::size_t k = data.k();
  if (state.w.size() != n || state.z.size() != n) {
    throw DimensionMismatch("update_beta: latent vectors do not match the data");
  }
  if (prior.k() != k) throw DimensionMismatch("update_beta: prior dimension");
  kt.precision_terms(state.w.data(), state.z.data(), spec.theta, 1.0 / spec.tau2(), s.c.data(),
                     s.r.data(), n);
  SquareMatrix precision(k);
  Vec linear(k);
  kernels::normal_equations(kt, data.x(), std::span<const double>(s.c.data(), n),
                            std::span<const double>(s.r.data(), n), precision, linear,
                            std::span<double>(s.tmp.data(), n));
  precision += prior.precision();
  for (std::size_t j = 0; j < k; ++j) linear[j] += prior.precision_mean()[j];
  out = sample_mvn_precision(SpdMatrix(std::move(precision)), linear, rng);
}

void draw_w(ChainState& state, const Dataset& data, const QuantileSpec& spec, RngStream& rng,
            const kernels::KernelTable& kt, SweepScratch& s) {
  const std::size_t n = data.n();
  kernels::linear_predictor(kt, data.x(), state.beta, std::span<double>(s.eta.data(), n));
  const double psi = spec.theta * spec.theta / spec.tau2() + 2.0;
  const double inv_tau = 1.0 / spec.tau;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (state.z[i] - s.eta[i]) * inv_tau;
    state.w[i] = std::max(gig_half_sample(d * d, psi, rng), kWeightFloor);
  }
}

void draw_z(ChainState& state, const Dataset& data, const QuantileSpec& spec, RngStream& rng,
            const kernels::KernelTable& kt, SweepScratch& s) {
  const std::size_t n = data.n();
  kernels::linear_predictor(kt, data.x(), state.beta, std::span<double>(s.eta.data(), n));
  const double tau2 = spec.tau2();
  for (std::size_t i = 0; i < n; ++i) {
    const double loc = s.eta[i] + spec.theta * state.w[i];
    const double var = tau2 * state.w[i];
    state.z[i] = state.y[i] == 1 ? trunc_normal_sample(loc, var, 0.0, kInf, rng)
                                 : trunc_normal_sample(loc, var, -kInf, 0.0, rng);
  }
}

void draw_z_collapsed(ChainState& state, const Dataset& data, const QuantileSpec& spec,
                      RngStream& rng, const kernels::KernelTable& kt, SweepScratch& s) {
  const std::size_t n = data.n();
  kernels::linear_predictor(kt, data.x(), state.beta, std::span<double>(s.eta.data(), n));
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = state.y[i] == 1;
    double z = 0.0;
    // Rounding can put eta + eps on the wrong side of 0 when |eta| is large.
    do {
      z = s.eta[i] + al_truncated_sample(-s.eta[i], positive, spec.p, rng);
    } while (positive ? !(z > 0.0) : !(z <= 0.0));
    state.z[i] = z;
  }
}

void init_common(ChainState& state, const Dataset& data, const NaivePrior& prior,
                 const QuantileSpec& spec, RngStream& rng, bool overdispersed,
                 const kernels::KernelTable& kt, SweepScratch& s) {
  const std::size_t n = data.n();
  if (overdispersed) {
    if (!prior.proper()) throw InvalidConfig("overdispersed start needs a proper beta prior");
    state.beta = sample_mvn_precision(SpdMatrix(prior.precision()), prior.precision_mean(), rng);
  } else {
    state.beta = prior.beta0();
  }
  state.w.assign(n, 1.0);
  state.z.assign(n, 0.0);
  draw_z(state, data, spec, rng, kt, s);
}

}  // namespace detail

Vec update_beta(const ChainState& state, const Dataset& data, const NaivePrior& prior,
                const QuantileSpec& spec, RngStream& rng, const kernels::KernelTable& kt) {
  SweepScratch s;
  s.resize(data.n());
  Vec out;
  detail::draw_beta(state, data, prior, spec, rng, kt, s, out);
  return out;
}

Vec update_w(const ChainState& state, const Dataset& data, const QuantileSpec& spec,
             RngStream& rng, const kernels::KernelTable& kt) {
  SweepScratch s;
  s.resize(data.n());
  ChainState next = state;
  next.w.resize(data.n());
  detail::draw_w(next, data, spec, rng, kt, s);
  return next.w;
}

Vec update_z(const ChainState& state, const Dataset& data, const QuantileSpec& spec,
             RngStream& rng, const kernels::KernelTable& kt) {
  SweepScratch s;
  s.resize(data.n());
  ChainState next = state;
  next.z.resize(data.n());
  detail::draw_z(next, data, spec, rng, kt, s);
  return next.z;
}

Vec update_z_collapsed(const ChainState& state, const Dataset& data, const QuantileSpec& spec,
                       RngStream& rng, const kernels::KernelTable& kt) {
  SweepScratch s;
  s.resize(data.n());
  ChainState next = state;
  next.z.resize(data.n());
  detail::draw_z_collapsed(next, data, spec, rng, kt, s);
  return next.z;
}

NaiveSampler::NaiveSampler(const Dataset& data, NaivePrior prior, double p,
                           const kernels::KernelTable& kt)
    : data_(data), prior_(std::move(prior)), spec_(al_constants(p)), kt_(kt) {
  if (prior_.k() != data_.k()) throw DimensionMismatch("NaiveSampler: prior dimension");
  scratch_.resize(data_.n());
}

void NaiveSampler::initialize(RngStream& rng, bool overdispersed) {
  state_.y = data_.y_obs();
  state_.delta01 = 0.0;
  state_.delta10 = 0.0;
  detail::init_common(state_, data_, prior_, spec_, rng, overdispersed, kt_, scratch_);
}

void NaiveSampler::sweep(RngStream& rng) {
  scratch_.resize(data_.n());
  detail::draw_beta(state_, data_, prior_, spec_, rng, kt_, scratch_, state_.beta);
  detail::draw_w(state_, data_, spec_, rng, kt_, scratch_);
  detail::draw_z(state_, data_, spec_, rng, kt_, scratch_);
}

const char* model_name(ModelKind kind) {
  return kind == ModelKind::kNaive ? "naive" : "misclass";
}

ModelKind parse_model(const std::string& name) {
  if (name == "naive") return ModelKind::kNaive;
  if (name == "misclass") return ModelKind::kMisclass;
  throw InvalidConfig("unknown model '" + name + "' (expected naive or misclass)");
}

std::vector<std::string> parameter_names(const Dataset& data, ModelKind kind) {
  std::vector<std::string> names = data.column_names();
  if (kind == ModelKind::kMisclass) {
    names.emplace_back("delta01");
    names.emplace_back("delta10");
  }
  return names;
}

namespace {

template <typename Sampler>
DrawStore drive_chain(Sampler& sampler, const Dataset& data, ModelKind kind,
                      const ChainConfig& cfg, RngStream& rng) {
  cfg.validate();
  DrawStore store(parameter_names(data, kind), cfg.meta());
  const std::size_t chain = store.add_chain();
  try {
    sampler.initialize(rng, cfg.overdispersed_start);
  } catch (const Error& e) {
    throw ChainError(0, e.what());
  }
  Vec row(store.parameters());
  if constexpr (requires { sampler.set_adapting(true); }) {
    sampler.set_adapting(cfg.burn_in > 0);
  }
  for (long t = 1; t <= cfg.total_iterations; ++t) {
    if constexpr (requires { sampler.set_adapting(false); }) {
      if (t == cfg.burn_in + 1) sampler.set_adapting(false);
    }
    try {
      sampler.sweep(rng);
    } catch (const Error& e) {
      throw ChainError(t, e.what());
    }
    if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0) {
      const ChainState& st = sampler.state();
      std::copy(st.beta.begin(), st.beta.end(), row.begin());
      if (kind == ModelKind::kMisclass) {
        row[st.beta.size()] = st.delta01;
        row[st.beta.size() + 1] = st.delta10;
      }
      store.append(chain, row);
    }
  }
  return store;
}

}  // namespace

DrawStore run_naive_chain(const Dataset& data, const NaivePrior& prior, const ChainConfig& cfg,
                          RngStream& rng) {
  cfg.validate();
  NaiveSampler sampler(data, prior, cfg.p);
  return drive_chain(sampler, data, ModelKind::kNaive, cfg, rng);
}

DrawStore run_misclass_chain(const Dataset& data, const MisclassPrior& prior,
                             const ChainConfig& cfg, RngStream& rng, MisclassOptions options) {
  cfg.validate();
  MisclassSampler sampler(data, prior, cfg.p, options);
  return drive_chain(sampler, data, ModelKind::kMisclass, cfg, rng);
}

DrawStore run_chains(ModelKind kind, const Dataset& data, const MisclassPrior& prior,
                     const ChainConfig& cfg, std::size_t chains, const RngStream& base,
                     std::size_t workers, MisclassOptions options) {
  cfg.validate();
  if (chains == 0) throw InvalidConfig("need at least one chain");
  std::vector<DrawStore> results(chains);
  parallel_for(chains, worker_count(workers), [&](std::size_t c) {
    RngStream rng = base.split({static_cast<std::uint64_t>(c)});
    results[c] = kind == ModelKind::kNaive ? run_naive_chain(data, prior.beta, cfg, rng)
                                           : run_misclass_chain(data, prior, cfg, rng, options);
  });
  DrawStore merged = std::move(results.front());
  for (std::size_t c = 1; c < chains; ++c) merged.absorb(results[c]);
  merged.check_balanced();
  return merged;
}

}  // namespace bqr
