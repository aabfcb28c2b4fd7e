#pragma once

// Data-parallel inner loops of the samplers. Every kernel has a scalar
// reference implementation; an AVX2/FMA variant is selected at runtime when
// the CPU supports it. Variants agree to rounding (reduction order differs),
// so bit-identical replays require the same variant; set BQR_SIMD=scalar to
// pin the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace bqr {
class DesignMatrix;
class SquareMatrix;
}  // namespace bqr

namespace bqr::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y_i += alpha x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out_i = a_i b_i
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // c_i = inv_tau2 / w_i,  r_i = z_i - theta w_i
  void (*precision_terms)(const double* w, const double* z, double theta, double inv_tau2,
                          double* c, double* r, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();
// Chosen once per process: AVX2 when available unless BQR_SIMD=scalar.
const KernelTable& active();

// out = X beta
void linear_predictor(const KernelTable& kt, const DesignMatrix& x,
                      std::span<const double> beta, std::span<double> out);

// gram = sum_i c_i x_i x_i^T,  rhs = sum_i c_i r_i x_i. `scratch` must hold n
// doubles.
void normal_equations(const KernelTable& kt, const DesignMatrix& x, std::span<const double> c,
                      std::span<const double> r, SquareMatrix& gram, std::span<double> rhs,
                      std::span<double> scratch);

}  // namespace bqr::kernels
