#include "bqr/kernels.hpp"

namespace bqr::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void precision_terms_scalar(const double* w, const double* z, double theta, double inv_tau2,
                            double* c, double* r, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = inv_tau2 / w[i];
    r[i] = z[i] - theta * w[i];
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, mul_scalar,
                                 precision_terms_scalar};
  return table;
}

}  // namespace bqr::kernels
