#pragma once

#include "shiftlab/numeric.hpp"

#include <cstddef>
#include <vector>

namespace shiftlab {

// Dense row-major matrix. Exact element types only (BigInt, Rational).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<BigInt>;
using RationalMatrix = Matrix<Rational>;

// Fraction-free (Bareiss) determinant with row pivoting.
BigInt determinant(IntMatrix m);

// Exact rank via fraction-free elimination.
std::size_t rank(IntMatrix m);
std::size_t rank(const RationalMatrix& m);

// Gauss-Jordan inverse over Q. Throws InvalidArgument if singular.
RationalMatrix inverse(const IntMatrix& m);

// det(m) * m^{-1}; throws if the product is not integral (it always is).
IntMatrix adjugate(const IntMatrix& m);

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

// Max absolute row sum.
BigInt infinity_norm(const IntMatrix& m);

// Indices of the first rows (in order) that together reach full column rank;
// fewer than cols() entries means the columns are dependent.
std::vector<std::size_t> first_independent_rows(const IntMatrix& m);

}  // namespace shiftlab
