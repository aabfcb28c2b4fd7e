#include "bqr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bqr/errors.hpp"

namespace bqr {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

double psrf(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw InsufficientDraws("psrf: need at least two chains");
  const std::size_t m = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != m) throw DimensionMismatch("psrf: chains differ in length");
  }
  if (m < 10) throw InsufficientDraws("psrf: need at least 10 draws per chain");
  const double n_chains = static_cast<double>(chains.size());
  const double md = static_cast<double>(m);
  std::vector<double> means;
  double within = 0.0;
  for (const auto& c : chains) {
    const double mu = mean_of(c);
    means.push_back(mu);
    within += sample_variance(c, mu);
  }
  within /= n_chains;
  const double grand = mean_of(means);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= md / (n_chains - 1.0);
  if (!(within > 0.0)) {
    // Constant chains: agreement means no inflation, disagreement is infinite.
    return between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return std::sqrt(((md - 1.0) / md * within + between / md) / within);
}

double psrf(const DrawStore& draws, const std::string& parameter) {
  const std::size_t idx = draws.index_of(parameter);
  std::vector<std::vector<double>> chains;
  for (std::size_t c = 0; c < draws.chains(); ++c) chains.push_back(draws.column(c, idx));
  return psrf(chains);
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyDraws("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize_values(const std::string& name, std::vector<double> values) {
  if (values.empty()) throw EmptyDraws("summarize: no draws for " + name);
  Summary s;
  s.parameter = name;
  s.mean = mean_of(values);
  std::sort(values.begin(), values.end());
  s.lower = sorted_quantile(values, 0.025);
  s.upper = sorted_quantile(values, 0.975);
  s.excludes_zero = !(s.lower <= 0.0 && 0.0 <= s.upper);
  return s;
}

std::vector<Summary> summarize(const DrawStore& draws) {
  if (draws.chains() == 0 || draws.draws_per_chain() == 0) {
    throw EmptyDraws("summarize: draw store is empty");
  }
  std::vector<Summary> out;
  for (std::size_t j = 0; j < draws.parameters(); ++j) {
    std::vector<double> pooled;
    for (std::size_t c = 0; c < draws.chains(); ++c) {
      const auto col = draws.column(c, j);
      pooled.insert(pooled.end(), col.begin(), col.end());
    }
    out.push_back(summarize_values(draws.names()[j], std::move(pooled)));
  }
  return out;
}

double batch_means_se(std::span<const double> series, std::size_t batches) {
  if (batches < 2 || series.size() < 2 * batches) {
    throw InsufficientDraws("batch_means_se: series too short for the batch count");
  }
  const std::size_t size = series.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    means.push_back(mean_of(series.subspan(b * size, size)));
  }
  const double grand = mean_of(means);
  return std::sqrt(sample_variance(means, grand) / static_cast<double>(batches));
}

std::vector<ParameterMetrics> replication_metrics(
    const std::vector<std::vector<Summary>>& estimates, std::span<const double> truth) {
  if (estimates.empty()) throw InsufficientDraws("replication_metrics: no replications");
  std::vector<ParameterMetrics> out(truth.size());
  for (const auto& rep : estimates) {
    if (rep.size() < truth.size()) {
      throw DimensionMismatch("replication_metrics: fewer estimates than true values");
    }
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double err = rep[j].mean - truth[j];
      out[j].bias += err;
      out[j].mse += err * err;
      if (rep[j].lower <= truth[j] && truth[j] <= rep[j].upper) out[j].coverage += 1.0;
    }
  }
  const double r = static_cast<double>(estimates.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    out[j].parameter = estimates.front()[j].parameter;
    out[j].bias /= r;
    out[j].mse /= r;
    out[j].coverage /= r;
    out[j].replications = estimates.size();
  }
  return out;
}

}  // namespace bqr
