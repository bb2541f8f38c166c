#include "shiftlab/exact_linalg.hpp"

#include <utility>

namespace shiftlab {

namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(a, c), m(b, c));
}

// Bareiss elimination in place; returns rank. Tracks the sign of row swaps.
std::size_t bareiss(IntMatrix& m, int& sign, BigInt& last_pivot) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  BigInt prev = 1;
  std::size_t r = 0;
  sign = 1;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m(pivot, c) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != r) {
      swap_rows(m, pivot, r);
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
      }
      m(i, c) = 0;
    }
    prev = m(r, c);
    ++r;
  }
  last_pivot = prev;
  return r;
}

}  // namespace

BigInt determinant(IntMatrix m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  if (m.rows() == 0) return 1;
  int sign = 1;
  BigInt last;
  std::size_t r = bareiss(m, sign, last);
  if (r < m.rows()) return 0;
  return sign * m(m.rows() - 1, m.cols() - 1);
}

std::size_t rank(IntMatrix m) {
  int sign = 1;
  BigInt last;
  return bareiss(m, sign, last);
}

std::size_t rank(const RationalMatrix& m) {
  IntMatrix scaled(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    BigInt lcm = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      BigInt den = boost::multiprecision::denominator(m(i, j));
      lcm = lcm / gcd(lcm, den) * den;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Rational v = m(i, j) * lcm;
      scaled(i, j) = boost::multiprecision::numerator(v);
    }
  }
  return rank(std::move(scaled));
}

RationalMatrix inverse(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw DimensionMismatch("inverse of a non-square matrix");
  RationalMatrix a(n, n);
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Rational(m(i, j));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && a(pivot, c) == 0) ++pivot;
    if (pivot == n) throw InvalidArgument("matrix is singular");
    if (pivot != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(pivot, j), a(c, j));
        std::swap(inv(pivot, j), inv(c, j));
      }
    }
    const Rational p = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= p;
      inv(c, j) /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

IntMatrix adjugate(const IntMatrix& m) {
  const BigInt det = determinant(m);
  if (det == 0) throw InvalidArgument("adjugate requested for a singular matrix");
  RationalMatrix inv = inverse(m);
  IntMatrix adj(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Rational v = inv(i, j) * det;
      if (boost::multiprecision::denominator(v) != 1)
        throw Error("det * inverse is not integral; exact arithmetic is broken");
      adj(i, j) = boost::multiprecision::numerator(v);
    }
  }
  return adj;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

BigInt infinity_norm(const IntMatrix& m) {
  BigInt best = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    BigInt s = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += boost::multiprecision::abs(m(i, j));
    if (s > best) best = s;
  }
  return best;
}

std::vector<std::size_t> first_independent_rows(const IntMatrix& m) {
  std::vector<std::size_t> chosen;
  std::size_t current_rank = 0;
  for (std::size_t i = 0; i < m.rows() && chosen.size() < m.cols(); ++i) {
    IntMatrix trial(chosen.size() + 1, m.cols());
    for (std::size_t t = 0; t < chosen.size(); ++t)
      for (std::size_t j = 0; j < m.cols(); ++j) trial(t, j) = m(chosen[t], j);
    for (std::size_t j = 0; j < m.cols(); ++j) trial(chosen.size(), j) = m(i, j);
    std::size_t r = rank(std::move(trial));
    if (r > current_rank) {
      chosen.push_back(i);
      current_rank = r;
    }
  }
  return chosen;
}

}  // namespace shiftlab
