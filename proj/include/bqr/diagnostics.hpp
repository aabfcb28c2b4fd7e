#pragma once

#include <span>
#include <string>
#include <vector>

#include "bqr/model.hpp"

namespace bqr {

struct Summary {
  std::string parameter;
  double mean = 0.0;
  double lower = 0.0;  // 2.5% empirical quantile
  double upper = 0.0;  // 97.5% empirical quantile
  bool excludes_zero = false;
};

// Gelman-Rubin potential scale reduction over >= 2 equal-length chains of
// >= 10 draws: sqrt(((m-1)/m W + B/m) / W) with m draws per chain.
double psrf(const std::vector<std::vector<double>>& chains);
double psrf(const DrawStore& draws, const std::string& parameter);

// Type-7 (linear interpolation) empirical quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double q);

// Posterior mean and equal-tailed 95% interval per parameter, pooled over
// chains.
std::vector<Summary> summarize(const DrawStore& draws);
Summary summarize_values(const std::string& name, std::vector<double> values);

// Standard error of the mean of an autocorrelated series by non-overlapping
// batch means.
double batch_means_se(std::span<const double> series, std::size_t batches = 25);

struct ParameterMetrics {
  std::string parameter;
  double mse = 0.0;
  double bias = 0.0;
  double coverage = 0.0;
  std::size_t replications = 0;
};

// Across replications: bias = mean(est - truth), MSE = mean((est - truth)^2),
// coverage = share of intervals containing the truth. `estimates[r]` lists
// the summaries of replication r; the first truth.size() entries are used.
std::vector<ParameterMetrics> replication_metrics(
    const std::vector<std::vector<Summary>>& estimates, std::span<const double> truth);

}  // namespace bqr
