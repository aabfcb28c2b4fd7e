#include "bqr/distributions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bqr/errors.hpp"

namespace bqr {

namespace {

void check_quantile(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(who) + ": quantile level must lie in (0,1), got " +
                      std::to_string(p));
  }
}

// Smaller of the two AL tail probabilities at x: F(x) for x <= 0, 1 - F(x)
// for x > 0.
double al_small_tail(double x, double p) {
  return x <= 0.0 ? p * std::exp((1.0 - p) * x) : (1.0 - p) * std::exp(-p * x);
}

// Below this standardized bound the untruncated normal keeps >= 30% of its
// mass above it (Phi(-0.5244) = 0.3), so plain rejection is used.
constexpr double kNaiveCut = 0.52440051270804067;

double std_tn_lower(double a, RngStream& rng) {
  if (a <= kNaiveCut) {
    for (;;) {
      const double x = draw::std_normal(rng);
      if (x > a) return x;
    }
  }
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + draw::exponential(alpha, rng);
    const double d = x - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return x;
  }
}

double std_tn_interval(double a, double b, RngStream& rng) {
  if (b <= 0.0) return -std_tn_interval(-b, -a, rng);

  const double mass = a >= 0.0 ? std_normal_cdf(-a) - std_normal_cdf(-b)
                               : std_normal_cdf(b) - std_normal_cdf(a);
  if (mass >= 0.3) {
    for (;;) {
      const double x = draw::std_normal(rng);
      if (x > a && x < b) return x;
    }
  }
  if (a < 0.0) {
    // Narrow window straddling zero: uniform proposal against exp(-x^2/2).
    for (;;) {
      const double x = a + (b - a) * rng.uniform();
      if (rng.uniform() <= std::exp(-0.5 * x * x)) return x;
    }
  }
  const double root = std::sqrt(a * a + 4.0);
  const double alpha = 0.5 * (a + root);
  const double exp_cut =
      a + 2.0 * std::sqrt(std::numbers::e) / (a + root) * std::exp(0.25 * (a * a - a * root));
  if (b > exp_cut) {
    for (;;) {
      const double x = a + draw::exponential(alpha, rng);
      if (x >= b) continue;
      const double d = x - alpha;
      if (rng.uniform() <= std::exp(-0.5 * d * d)) return x;
    }
  }
  for (;;) {
    const double x = a + (b - a) * rng.uniform();
    if (rng.uniform() <= std::exp(0.5 * (a * a - x * x))) return x;
  }
}

}  // namespace

QuantileSpec al_constants(double p) {
  check_quantile(p, "al_constants");
  const double pq = p * (1.0 - p);
  return QuantileSpec{p, (1.0 - 2.0 * p) / pq, std::sqrt(2.0 / pq)};
}

double al_cdf(double x, double p) {
  check_quantile(p, "al_cdf");
  if (std::isnan(x)) throw DomainError("al_cdf: NaN argument");
  const double t = al_small_tail(x, p);
  return x <= 0.0 ? t : 1.0 - t;
}

double al_survival(double x, double p) {
  check_quantile(p, "al_survival");
  if (std::isnan(x)) throw DomainError("al_survival: NaN argument");
  const double t = al_small_tail(x, p);
  return x <= 0.0 ? 1.0 - t : t;
}

double al_log_cdf(double x, double p) {
  check_quantile(p, "al_log_cdf");
  if (x <= 0.0) return std::log(p) + (1.0 - p) * x;
  return std::log1p(-(1.0 - p) * std::exp(-p * x));
}

double al_log_survival(double x, double p) {
  check_quantile(p, "al_log_survival");
  if (x <= 0.0) return std::log1p(-p * std::exp((1.0 - p) * x));
  return std::log(1.0 - p) - p * x;
}

double al_pdf(double x, double p) {
  check_quantile(p, "al_pdf");
  const double rho = x * (p - (x < 0.0 ? 1.0 : 0.0));
  return p * (1.0 - p) * std::exp(-rho);
}

double al_sample(const QuantileSpec& spec, RngStream& rng) {
  const double w = draw::exponential(1.0, rng);
  const double u = draw::std_normal(rng);
  return spec.theta * w + spec.tau * std::sqrt(w) * u;
}

double al_truncated_sample(double cut, bool above, double p, RngStream& rng) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("al_truncated_sample: p must lie in (0,1)");
  if (std::isnan(cut)) throw DomainError("al_truncated_sample: cut is NaN");
  const double q = 1.0 - p;
  if (above) {
    // Right tail has density p q e^{-p x}; memoryless beyond a cut at or past 0.
    if (cut >= 0.0) return cut + draw::exponential(p, rng);
    const double left_mass = -p * std::expm1(q * cut);  // F(0) - F(cut)
    if (rng.uniform() * (q + left_mass) < q) return draw::exponential(p, rng);
    // Density proportional to e^{q x} on (cut, 0].
    return std::log1p(rng.uniform_open() * std::expm1(q * cut)) / q;
  }
  if (cut <= 0.0) return cut - draw::exponential(q, rng);
  const double right_mass = -q * std::expm1(-p * cut);  // F(cut) - F(0)
  if (rng.uniform() * (p + right_mass) < p) return -draw::exponential(q, rng);
  // Density proportional to e^{-p x} on (0, cut].
  return -std::log1p(rng.uniform_open() * std::expm1(-p * cut)) / p;
}

double inverse_gaussian_sample(double mu, double lambda, RngStream& rng) {
  if (!(mu > 0.0) || !(lambda > 0.0)) {
    throw DomainError("inverse_gaussian_sample: mu and lambda must be positive");
  }
  const double nu = draw::std_normal(rng);
  const double y = nu * nu;
  const double a = mu * y / (2.0 * lambda);
  // mu * (1 + a - sqrt(a^2 + 2a)) without the cancellation.
  const double x = mu / (1.0 + a + std::sqrt(a * (a + 2.0)));
  if (rng.uniform() * (mu + x) <= mu) return x;
  return mu * mu / x;
}

double gig_half_sample(double chi, double psi, RngStream& rng) {
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    throw DomainError("gig_half_sample: psi must be positive and finite");
  }
  if (!(chi >= 0.0) || !std::isfinite(chi)) {
    throw DomainError("gig_half_sample: chi must be non-negative and finite");
  }
  if (chi < 1e-12) return draw::gamma(0.5, 0.5 * psi, rng);
  // 1/W ~ GIG(-1/2, psi, chi) = IG(mean sqrt(psi/chi), shape psi).
  const double v = inverse_gaussian_sample(std::sqrt(psi / chi), psi, rng);
  return 1.0 / v;
}

double trunc_normal_sample(double mu, double var, double lower, double upper,
                           RngStream& rng) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw DomainError("trunc_normal_sample: variance must be positive and finite");
  }
  if (!(lower < upper)) {
    throw DomainError("trunc_normal_sample: lower bound must be below upper bound");
  }
  if (!std::isfinite(mu)) throw DomainError("trunc_normal_sample: non-finite location");
  const double sd = std::sqrt(var);
  const double a = (lower - mu) / sd;
  const double b = (upper - mu) / sd;
  for (;;) {
    double x;
    if (std::isinf(a) && std::isinf(b)) {
      x = draw::std_normal(rng);
    } else if (std::isinf(b)) {
      x = std_tn_lower(a, rng);
    } else if (std::isinf(a)) {
      x = -std_tn_lower(-b, rng);
    } else {
      x = std_tn_interval(a, b, rng);
    }
    const double out = mu + sd * x;
    // Rounding of mu + sd * x can land on a bound; redraw.
    if (out > lower && out < upper) return out;
  }
}

Vec sample_mvn_precision(const SpdMatrix& precision, std::span<const double> linear_term,
                         RngStream& rng) {
  if (linear_term.size() != precision.dim()) {
    throw DimensionMismatch("sample_mvn_precision: linear term length");
  }
  const LowerTriangular l = chol_factor(precision);
  Vec mean = l.solve(linear_term);
  Vec eps(precision.dim());
  for (double& e : eps) e = draw::std_normal(rng);
  const Vec offset = l.solve_upper(eps);
  for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += offset[i];
  return mean;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace draw {

double uniform(RngStream& rng) { return rng.uniform(); }

double std_normal(RngStream& rng) {
  // Marsaglia polar method; the second variate is discarded to keep the
  // stream stateless.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double exponential(double rate, RngStream& rng) {
  if (!(rate > 0.0)) throw DomainError("exponential: rate must be positive");
  return -std::log(rng.uniform_open()) / rate;
}

namespace {

// Marsaglia & Tsang for shape >= 1, returned as log(d v).
double log_gamma_mt(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = std_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d * v);
    }
  }
}

}  // namespace

double log_gamma_unit(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma: shape must be positive and finite");
  }
  if (shape >= 1.0) return log_gamma_mt(shape, rng);
  // G(a) = G(a + 1) * U^{1/a}
  const double lg = log_gamma_mt(shape + 1.0, rng);
  return lg + std::log(rng.uniform_open()) / shape;
}

double gamma(double shape, double rate, RngStream& rng) {
  if (!(rate > 0.0)) throw DomainError("gamma: rate must be positive");
  return std::exp(log_gamma_unit(shape, rng)) / rate;
}

double beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: shapes must be positive");
  const double la = log_gamma_unit(a, rng);
  const double lb = log_gamma_unit(b, rng);
  return 1.0 / (1.0 + std::exp(lb - la));
}

bool bernoulli(double prob, RngStream& rng) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw DomainError("bernoulli: probability must lie in [0,1]");
  }
  return rng.uniform() < prob;
}

std::int64_t binomial(std::int64_t trials, double prob, RngStream& rng) {
  if (trials < 0) throw DomainError("binomial: trials must be non-negative");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw DomainError("binomial: probability must lie in [0,1]");
  }
  if (trials == 0 || prob == 0.0) return 0;
  if (prob == 1.0) return trials;
  const bool flip = prob > 0.5;
  const double q = flip ? 1.0 - prob : prob;
  // Geometric waiting times between successes; expected cost trials * q.
  const double log_fail = std::log1p(-q);
  std::int64_t successes = 0;
  double position = 0.0;
  for (;;) {
    position += std::ceil(std::log(rng.uniform_open()) / log_fail);
    if (position > static_cast<double>(trials)) break;
    ++successes;
  }
  return flip ? trials - successes : successes;
}

}  // namespace draw

}  // namespace bqr
