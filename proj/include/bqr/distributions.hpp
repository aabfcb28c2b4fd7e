#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "bqr/linalg.hpp"
#include "bqr/rng.hpp"

namespace bqr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Constants of the normal-exponential mixture for the asymmetric Laplace
// AL(0, 1, p): eps = theta * w + tau * sqrt(w) * u, w ~ Exp(1), u ~ N(0, 1).
struct QuantileSpec {
  double p;
  double theta;  // (1 - 2p) / (p (1 - p))
  double tau;    // sqrt(2 / (p (1 - p)))

  double tau2() const noexcept { return tau * tau; }
};

QuantileSpec al_constants(double p);

// CDF and survival of AL(0, 1, p). Both are computed from the same small-tail
// term so that al_cdf(x) + al_survival(x) == 1 exactly.
double al_cdf(double x, double p);
double al_survival(double x, double p);
// log F(x) and log(1 - F(x)), accurate deep in either tail.
double al_log_cdf(double x, double p);
double al_log_survival(double x, double p);
// Density p (1 - p) exp(-rho_p(x)).
double al_pdf(double x, double p);

double al_sample(const QuantileSpec& spec, RngStream& rng);

// AL(0, 1, p) conditioned on x > cut (above = true) or x <= cut, by exact
// inversion: each tail is exponential, the piece between cut and 0 is a
// truncated exponential.
double al_truncated_sample(double cut, bool above, double p, RngStream& rng);

// GIG with index 1/2: density proportional to w^{-1/2} exp(-(chi / w + psi w) / 2).
double gig_half_sample(double chi, double psi, RngStream& rng);

// Inverse Gaussian with mean mu and shape lambda (Michael, Schucany & Haas).
double inverse_gaussian_sample(double mu, double lambda, RngStream& rng);

// N(mu, var) restricted to (lower, upper); either bound may be infinite.
double trunc_normal_sample(double mu, double var, double lower, double upper, RngStream& rng);

// Draw from N(P^{-1} b, P^{-1}) given the precision P and linear term b.
Vec sample_mvn_precision(const SpdMatrix& precision, std::span<const double> linear_term,
                         RngStream& rng);

// Standard normal cdf via erfc.
double std_normal_cdf(double x);

namespace draw {

double uniform(RngStream& rng);
double std_normal(RngStream& rng);
double exponential(double rate, RngStream& rng);
double gamma(double shape, double rate, RngStream& rng);
// log of a Gamma(shape, 1) variate; stays finite for shapes far below 1.
double log_gamma_unit(double shape, RngStream& rng);
double beta(double a, double b, RngStream& rng);
bool bernoulli(double prob, RngStream& rng);
std::int64_t binomial(std::int64_t trials, double prob, RngStream& rng);

}  // namespace draw

}  // namespace bqr
