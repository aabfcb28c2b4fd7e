#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bqr {

// n x k design matrix stored column-major so each covariate is a contiguous
// run of n doubles; the SIMD kernels stream over observations.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  DesignMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

  std::vector<double> row(std::size_t i) const {
    std::vector<double> r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace bqr
