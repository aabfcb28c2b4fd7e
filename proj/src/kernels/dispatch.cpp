#include <cstdlib>
#include <string_view>

#include "bqr/design.hpp"
#include "bqr/errors.hpp"
#include "bqr/kernels.hpp"
#include "bqr/linalg.hpp"

namespace bqr::kernels {

#if defined(BQR_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(BQR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("BQR_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
    const KernelTable* fast = avx2_table();
    return fast != nullptr ? fast : &scalar_table();
  }();
  return *chosen;
}

void linear_predictor(const KernelTable& kt, const DesignMatrix& x,
                      std::span<const double> beta, std::span<double> out) {
  const std::size_t n = x.rows();
  if (beta.size() != x.cols() || out.size() != n) {
    throw DimensionMismatch("linear_predictor");
  }
  for (double& v : out) v = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    kt.axpy(beta[j], x.column(j).data(), out.data(), n);
  }
}

void normal_equations(const KernelTable& kt, const DesignMatrix& x, std::span<const double> c,
                      std::span<const double> r, SquareMatrix& gram, std::span<double> rhs,
                      std::span<double> scratch) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (c.size() != n || r.size() != n || scratch.size() < n || rhs.size() != k ||
      gram.dim() != k) {
    throw DimensionMismatch("normal_equations");
  }
  for (std::size_t j = 0; j < k; ++j) {
    // scratch = c .* x_j, then one dot per remaining column.
    kt.mul(c.data(), x.column(j).data(), scratch.data(), n);
    rhs[j] = kt.dot(scratch.data(), r.data(), n);
    for (std::size_t l = j; l < k; ++l) {
      const double v = kt.dot(scratch.data(), x.column(l).data(), n);
      gram(j, l) = v;
      gram(l, j) = v;
    }
  }
}

}  // namespace bqr::kernels
