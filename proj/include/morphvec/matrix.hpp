#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace morphvec {

using Real = double;

// Dense row-major matrix. Rows are exposed as spans.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Real fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<Real> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<Real> data() noexcept { return data_; }
  std::span<const Real> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

inline Real dot(std::span<const Real> a, std::span<const Real> b) noexcept {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y += alpha * x
inline void axpy(Real alpha, std::span<const Real> x, std::span<Real> y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace morphvec
