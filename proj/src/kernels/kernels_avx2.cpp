// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "bqr/kernels.hpp"

#if defined(BQR_HAVE_AVX2)
#include <immintrin.h>

namespace bqr::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void precision_terms_avx2(const double* w, const double* z, double theta, double inv_tau2,
                          double* c, double* r, std::size_t n) {
  const __m256d vt = _mm256_set1_pd(theta);
  const __m256d vs = _mm256_set1_pd(inv_tau2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    _mm256_storeu_pd(c + i, _mm256_div_pd(vs, vw));
    _mm256_storeu_pd(r + i, _mm256_fnmadd_pd(vt, vw, _mm256_loadu_pd(z + i)));
  }
  for (; i < n; ++i) {
    c[i] = inv_tau2 / w[i];
    r[i] = z[i] - theta * w[i];
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, mul_avx2, precision_terms_avx2};
  return table;
}

}  // namespace bqr::kernels

#endif
