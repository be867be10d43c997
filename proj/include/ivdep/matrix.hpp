#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace ivdep {

/// Dense row-major matrix over an arbitrary scalar field.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{0}) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Appends a row; `values.size()` must equal cols() (or set cols on an empty matrix).
  void append_row(std::span<const T> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    assert(values.size() == cols_);
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  std::vector<T> multiply(std::span<const T> x) const {
    assert(x.size() == cols_);
    std::vector<T> out(rows_, T{0});
    for (std::size_t r = 0; r < rows_; ++r) {
      T acc{0};
      for (std::size_t c = 0; c < cols_; ++c) {
        const T& a = data_[r * cols_ + c];
        if (a != 0) acc += a * x[c];
      }
      out[r] = acc;
    }
    return out;
  }

  std::vector<T> multiply_transposed(std::span<const T> y) const {
    assert(y.size() == rows_);
    std::vector<T> out(cols_, T{0});
    for (std::size_t r = 0; r < rows_; ++r) {
      if (y[r] == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c) {
        const T& a = data_[r * cols_ + c];
        if (a != 0) out[c] += a * y[r];
      }
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace ivdep
