#include <gtest/gtest.h>

#include <cmath>

#include "bqr/design.hpp"
#include "bqr/distributions.hpp"
#include "bqr/kernels.hpp"
#include "bqr/linalg.hpp"

namespace bqr {
namespace {

Vec random_vec(std::size_t n, RngStream& rng, double lo = -2.0, double hi = 2.0) {
  Vec v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

const kernels::KernelTable* avx2_or_skip() { return kernels::avx2_table(); }

// Sizes straddling the vector width and unroll factors.
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 127, 1000};

TEST(Kernels, ScalarTableIsReference) {
  const auto& s = kernels::scalar_table();
  EXPECT_EQ(s.name, "scalar");
  const Vec a = {1, 2, 3};
  const Vec b = {4, 5, 6};
  EXPECT_EQ(s.dot(a.data(), b.data(), 3), 32.0);
  Vec y = {1, 1, 1};
  s.axpy(2.0, a.data(), y.data(), 3);
  EXPECT_EQ(y, (Vec{3, 5, 7}));
  Vec out(3);
  s.mul(a.data(), b.data(), out.data(), 3);
  EXPECT_EQ(out, (Vec{4, 10, 18}));
  Vec c(3), r(3);
  const Vec w = {1, 2, 4};
  const Vec z = {1, 1, 1};
  s.precision_terms(w.data(), z.data(), 0.5, 8.0, c.data(), r.data(), 3);
  EXPECT_EQ(c, (Vec{8, 4, 2}));
  EXPECT_EQ(r, (Vec{0.5, 0, -1}));
}

TEST(Kernels, ActiveTableIsKnown) {
  const auto& a = kernels::active();
  EXPECT_TRUE(a.name == "scalar" || a.name == "avx2");
}

TEST(Kernels, Avx2MatchesScalar) {
  const kernels::KernelTable* v = avx2_or_skip();
  if (v == nullptr) GTEST_SKIP() << "AVX2 variant unavailable on this build or CPU";
  const auto& s = kernels::scalar_table();
  RngStream rng(31);
  for (std::size_t n : kSizes) {
    const Vec a = random_vec(n, rng);
    const Vec b = random_vec(n, rng);
    const double ds = s.dot(a.data(), b.data(), n);
    const double dv = v->dot(a.data(), b.data(), n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    EXPECT_NEAR(ds, dv, 1e-14 * std::max(1.0, mag)) << "dot n=" << n;

    Vec ys = b;
    Vec yv = b;
    s.axpy(-1.7, a.data(), ys.data(), n);
    v->axpy(-1.7, a.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ys[i], yv[i], 1e-15 * 8) << "axpy";

    Vec ms(n), mv(n);
    s.mul(a.data(), b.data(), ms.data(), n);
    v->mul(a.data(), b.data(), mv.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(ms[i], mv[i]) << "mul";

    const Vec w = random_vec(n, rng, 0.01, 5.0);
    Vec cs(n), rs(n), cv(n), rv(n);
    s.precision_terms(w.data(), a.data(), 2.666, 0.1225, cs.data(), rs.data(), n);
    v->precision_terms(w.data(), a.data(), 2.666, 0.1225, cv.data(), rv.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(cs[i], cv[i], 1e-15 * std::abs(cs[i]) * 4) << "precision c";
      EXPECT_NEAR(rs[i], rv[i], 1e-14 * std::max(1.0, std::abs(rs[i]))) << "precision r";
    }
  }
}

TEST(Kernels, LinearPredictorAndNormalEquationsAgree) {
  const kernels::KernelTable* v = avx2_or_skip();
  if (v == nullptr) GTEST_SKIP() << "AVX2 variant unavailable on this build or CPU";
  const auto& s = kernels::scalar_table();
  RngStream rng(32);
  for (std::size_t n : {1u, 5u, 33u, 1000u}) {
    for (std::size_t k : {1u, 3u, 9u}) {
      DesignMatrix x(n, k);
      for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t j = 1; j < k; ++j) x(i, j) = draw::std_normal(rng);
      }
      const Vec beta = random_vec(k, rng);
      Vec es(n), ev(n);
      kernels::linear_predictor(s, x, beta, es);
      kernels::linear_predictor(*v, x, beta, ev);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(es[i], ev[i], 1e-13);

      const Vec c = random_vec(n, rng, 0.1, 3.0);
      const Vec r = random_vec(n, rng);
      SquareMatrix gs(k), gv(k);
      Vec rhs_s(k), rhs_v(k), scratch(n);
      kernels::normal_equations(s, x, c, r, gs, rhs_s, scratch);
      kernels::normal_equations(*v, x, c, r, gv, rhs_v, scratch);
      for (std::size_t a = 0; a < k; ++a) {
        EXPECT_NEAR(rhs_s[a], rhs_v[a], 1e-11 * static_cast<double>(n));
        for (std::size_t b = 0; b < k; ++b) {
          EXPECT_NEAR(gs(a, b), gv(a, b), 1e-11 * static_cast<double>(n));
        }
      }
    }
  }
}

TEST(Kernels, NormalEquationsMatchDirectSums) {
  RngStream rng(33);
  const std::size_t n = 57;
  const std::size_t k = 4;
  DesignMatrix x(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) x(i, j) = draw::std_normal(rng);
  }
  const Vec c = random_vec(n, rng, 0.1, 3.0);
  const Vec r = random_vec(n, rng);
  for (const kernels::KernelTable* kt : {&kernels::scalar_table(), kernels::avx2_table()}) {
    if (kt == nullptr) continue;
    SquareMatrix g(k);
    Vec rhs(k), scratch(n);
    kernels::normal_equations(*kt, x, c, r, g, rhs, scratch);
    for (std::size_t a = 0; a < k; ++a) {
      double want_rhs = 0.0;
      for (std::size_t i = 0; i < n; ++i) want_rhs += c[i] * r[i] * x(i, a);
      EXPECT_NEAR(rhs[a], want_rhs, 1e-12);
      for (std::size_t b = 0; b < k; ++b) {
        double want = 0.0;
        for (std::size_t i = 0; i < n; ++i) want += c[i] * x(i, a) * x(i, b);
        EXPECT_NEAR(g(a, b), want, 1e-12) << kt->name;
      }
    }
  }
}

}  // namespace
}  // namespace bqr
