#pragma once

// In-place sweep steps shared by the two samplers. Not part of the public
// surface; the free update_* functions wrap these.

#include "bqr/gibbs.hpp"

namespace bqr::detail {

void draw_beta(const ChainState& state, const Dataset& data, const NaivePrior& prior,
               const QuantileSpec& spec, RngStream& rng, const kernels::KernelTable& kt,
               SweepScratch& s, Vec& out);
void draw_w(ChainState& state, const Dataset& data, const QuantileSpec& spec, RngStream& rng,
            const kernels::KernelTable& kt, SweepScratch& s);
void draw_z(ChainState& state, const Dataset& data, const QuantileSpec& spec, RngStream& rng,
            const kernels::KernelTable& kt, SweepScratch& s);
// z_i | y_i, beta with w integrated out: x_i'beta plus truncated AL noise.
void draw_z_collapsed(ChainState& state, const Dataset& data, const QuantileSpec& spec,
                      RngStream& rng, const kernels::KernelTable& kt, SweepScratch& s);
void init_common(ChainState& state, const Dataset& data, const NaivePrior& prior,
                 const QuantileSpec& spec, RngStream& rng, bool overdispersed,
                 const kernels::KernelTable& kt, SweepScratch& s);

}  // namespace bqr::detail
