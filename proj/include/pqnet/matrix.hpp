#ifndef PQNET_MATRIX_HPP
#define PQNET_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace pqnet {

/// Small dense row-major matrix. Sized for class x station tables, not for
/// heavy linear algebra.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  [[nodiscard]] std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  [[nodiscard]] std::span<const T> flat() const noexcept { return data_; }
  [[nodiscard]] std::span<T> flat() noexcept { return data_; }

  [[nodiscard]] T row_sum(std::size_t r) const {
    T s{};
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c);
    return s;
  }
  [[nodiscard]] T col_sum(std::size_t c) const {
    T s{};
    for (std::size_t r = 0; r < rows_; ++r) s += (*this)(r, c);
    return s;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using CountMatrix = Matrix<long long>;

}  // namespace pqnet

#endif  // PQNET_MATRIX_HPP
