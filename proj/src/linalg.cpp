#include "bqr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bqr/errors.hpp"

namespace bqr {

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : dim_(rows.size()), data_() {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) {
      throw DimensionMismatch("SquareMatrix: ragged initializer");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

SquareMatrix SquareMatrix::identity(std::size_t dim) {
  SquareMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> diag) {
  SquareMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

SquareMatrix SquareMatrix::transpose() const {
  SquareMatrix t(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw DimensionMismatch("SquareMatrix product");
  SquareMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t m = 0; m < dim_; ++m) {
      const double a = (*this)(r, m);
      for (std::size_t c = 0; c < dim_; ++c) out(r, c) += a * rhs(m, c);
    }
  return out;
}

Vec SquareMatrix::operator*(std::span<const double> v) const {
  if (v.size() != dim_) throw DimensionMismatch("SquareMatrix * vector");
  Vec out(dim_, 0.0);
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& rhs) {
  if (rhs.dim_ != dim_) throw DimensionMismatch("SquareMatrix sum");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

SquareMatrix& SquareMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vec LowerTriangular::solve_lower(std::span<const double> b) const {
  const std::size_t k = dim();
  if (b.size() != k) throw DimensionMismatch("solve_lower");
  Vec x(b.begin(), b.end());
  for (std::size_t i = 0; i < k; ++i) {
    double acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc -= l_(i, j) * x[j];
    x[i] = acc / l_(i, i);
  }
  return x;
}

Vec LowerTriangular::solve_upper(std::span<const double> b) const {
  const std::size_t k = dim();
  if (b.size() != k) throw DimensionMismatch("solve_upper");
  Vec x(b.begin(), b.end());
  for (std::size_t ii = k; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t j = ii + 1; j < k; ++j) acc -= l_(j, ii) * x[j];
    x[ii] = acc / l_(ii, ii);
  }
  return x;
}

Vec LowerTriangular::solve(std::span<const double> b) const {
  return solve_upper(solve_lower(b));
}

SquareMatrix LowerTriangular::reconstruct() const { return l_ * l_.transpose(); }

SquareMatrix LowerTriangular::inverse() const {
  const std::size_t k = dim();
  SquareMatrix inv(k);
  Vec e(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    const Vec col = solve(e);
    for (std::size_t r = 0; r < k; ++r) inv(r, c) = col[r];
  }
  // Symmetric by construction up to rounding; make it exact.
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = r + 1; c < k; ++c) {
      const double m = 0.5 * (inv(r, c) + inv(c, r));
      inv(r, c) = m;
      inv(c, r) = m;
    }
  return inv;
}

SpdMatrix::SpdMatrix(SquareMatrix s) : s_(std::move(s)) {
  const std::size_t k = s_.dim();
  if (k == 0) throw DomainError("SpdMatrix: dimension must be positive");
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = r + 1; c < k; ++c) {
      const double m = 0.5 * (s_(r, c) + s_(c, r));
      s_(r, c) = m;
      s_(c, r) = m;
    }
  }
  for (double v : s_.data()) {
    if (!std::isfinite(v)) throw NonFinite("SpdMatrix: non-finite entry");
  }
}

LowerTriangular chol_factor(const SpdMatrix& s) {
  const std::size_t k = s.dim();
  SquareMatrix l(k);
  for (std::size_t j = 0; j < k; ++j) {
    double pivot = s(j, j);
    for (std::size_t m = 0; m < j; ++m) pivot -= l(j, m) * l(j, m);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw NotPositiveDefinite("chol_factor: pivot " + std::to_string(j) +
                                " is " + std::to_string(pivot));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < k; ++i) {
      double acc = s(i, j);
      for (std::size_t m = 0; m < j; ++m) acc -= l(i, m) * l(j, m);
      l(i, j) = acc / ljj;
    }
  }
  return LowerTriangular(std::move(l));
}

Vec spd_solve(const SpdMatrix& s, std::span<const double> b) {
  if (b.size() != s.dim()) throw DimensionMismatch("spd_solve");
  return chol_factor(s).solve(b);
}

double frobenius_norm(const SquareMatrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace bqr
