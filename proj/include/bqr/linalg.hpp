#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bqr {

using Vec = std::vector<double>;

// Dense row-major k x k matrix. Used for B0, the posterior precision and
// their factors; k stays small (tens), so no blocking or pivoting.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t dim, double fill = 0.0)
      : dim_(dim), data_(dim * dim, fill) {}
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SquareMatrix identity(std::size_t dim);
  static SquareMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  SquareMatrix transpose() const;
  SquareMatrix operator*(const SquareMatrix& rhs) const;
  Vec operator*(std::span<const double> v) const;
  SquareMatrix& operator+=(const SquareMatrix& rhs);
  SquareMatrix& operator*=(double s);

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Lower-triangular Cholesky factor L with L * L^T = S.
class LowerTriangular {
 public:
  explicit LowerTriangular(SquareMatrix l) : l_(std::move(l)) {}

  std::size_t dim() const noexcept { return l_.dim(); }
  double operator()(std::size_t r, std::size_t c) const { return l_(r, c); }
  const SquareMatrix& matrix() const noexcept { return l_; }

  // Solve L x = b.
  Vec solve_lower(std::span<const double> b) const;
  // Solve L^T x = b.
  Vec solve_upper(std::span<const double> b) const;
  // Solve (L L^T) x = b.
  Vec solve(std::span<const double> b) const;
  // L L^T
  SquareMatrix reconstruct() const;
  // (L L^T)^{-1}
  SquareMatrix inverse() const;

 private:
  SquareMatrix l_;
};

// Symmetric positive-definite matrix. Construction symmetrizes (S + S^T)/2
// and checks the diagonal; factorization is attempted lazily by callers.
class SpdMatrix {
 public:
  explicit SpdMatrix(SquareMatrix s);

  std::size_t dim() const noexcept { return s_.dim(); }
  double operator()(std::size_t r, std::size_t c) const { return s_(r, c); }
  const SquareMatrix& matrix() const noexcept { return s_; }

 private:
  SquareMatrix s_;
};

// Throws NotPositiveDefinite when a pivot is <= 0 or non-finite.
LowerTriangular chol_factor(const SpdMatrix& s);

// Solves S x = b through the Cholesky factor; never forms S^{-1}.
Vec spd_solve(const SpdMatrix& s, std::span<const double> b);

double frobenius_norm(const SquareMatrix& m);
double max_abs(std::span<const double> v);

}  // namespace bqr
