#ifndef SMOOTHPO_RANK_HPP
#define SMOOTHPO_RANK_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "smoothpo/solution.hpp"

namespace smoothpo {

/// Dense row-major matrix of small integers.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<long long> data;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  long long& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  long long operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  std::vector<long long> column(int c) const {
    std::vector<long long> v(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) v[static_cast<std::size_t>(r)] = (*this)(r, c);
    return v;
  }

  static IntMatrix from_columns(int rows, const std::vector<std::vector<long long>>& columns) {
    IntMatrix m(rows, static_cast<int>(columns.size()));
    for (int c = 0; c < m.cols; ++c) {
      require(columns[static_cast<std::size_t>(c)].size() == static_cast<std::size_t>(rows), "column length mismatch");
      for (int r = 0; r < rows; ++r) m(r, c) = columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
    }
    return m;
  }

  static IntMatrix block_diagonal(const std::vector<IntMatrix>& blocks) {
    int r = 0, c = 0;
    for (const auto& b : blocks) r += b.rows, c += b.cols;
    IntMatrix m(r, c);
    int r0 = 0, c0 = 0;
    for (const auto& b : blocks) {
      for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j) m(r0 + i, c0 + j) = b(i, j);
      r0 += b.rows;
      c0 += b.cols;
    }
    return m;
  }

  IntMatrix without_row(int skip) const {
    IntMatrix m(rows - 1, cols);
    for (int r = 0, o = 0; r < rows; ++r) {
      if (r == skip) continue;
      for (int c = 0; c < cols; ++c) m(o, c) = (*this)(r, c);
      ++o;
    }
    return m;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

namespace detail {

/// log2 of the Hadamard bound on every minor of m.
inline double log2_minor_bound(const IntMatrix& m) {
  double s = 0;
  for (int c = 0; c < m.cols; ++c) {
    double norm2 = 0;
    for (int r = 0; r < m.rows; ++r) norm2 += static_cast<double>(m(r, c)) * static_cast<double>(m(r, c));
    if (norm2 > 1) s += 0.5 * std::log2(norm2);
  }
  return s;
}

/// Fraction-free elimination to row echelon form. Returns the rank and,
/// through `det`, the determinant when the matrix is square.
template <class Int>
int bareiss(const IntMatrix& m, Int* det) {
  const int R = m.rows, C = m.cols;
  std::vector<Int> a(m.data.begin(), m.data.end());
  auto at = [&](int r, int c) -> Int& { return a[static_cast<std::size_t>(r) * C + c]; };
  Int prev = 1;
  int sign = 1;
  int rank = 0;
  for (int col = 0; col < C && rank < R; ++col) {
    int pivot = -1;
    for (int r = rank; r < R; ++r)
      if (at(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (int c = 0; c < C; ++c) std::swap(at(pivot, c), at(rank, c));
      sign = -sign;
    }
    for (int r = rank + 1; r < R; ++r) {
      for (int c = col + 1; c < C; ++c) at(r, c) = (at(rank, col) * at(r, c) - at(r, col) * at(rank, c)) / prev;
      at(r, col) = 0;
    }
    prev = at(rank, col);
    ++rank;
  }
  if (det) *det = (R == C && rank == R) ? Int(sign) * at(R - 1, C - 1) : Int(0);
  return rank;
}

}  // namespace detail

/// Exact rank. Uses 128-bit arithmetic when the Hadamard bound guarantees
/// no overflow and arbitrary precision otherwise.
inline int exact_rank(const IntMatrix& m) {
  if (m.rows == 0 || m.cols == 0) return 0;
  if (detail::log2_minor_bound(m) < 61) return detail::bareiss<__int128>(m, nullptr);
  return detail::bareiss<boost::multiprecision::cpp_int>(m, nullptr);
}

inline bool rank_full(const IntMatrix& m) { return exact_rank(m) == std::min(m.rows, m.cols); }

inline boost::multiprecision::cpp_int exact_determinant(const IntMatrix& m) {
  require(m.rows == m.cols, "determinant needs a square matrix");
  if (m.rows == 0) return 1;
  boost::multiprecision::cpp_int det;
  detail::bareiss<boost::multiprecision::cpp_int>(m, &det);
  return det;
}

/// Nonzero integer vector y with y^T m = 0 for an m x (m-1) matrix of full
/// column rank, built from signed maximal minors.
inline std::vector<boost::multiprecision::cpp_int> left_null_vector(const IntMatrix& m) {
  require(m.rows == m.cols + 1, "left null vector needs an (m) x (m-1) matrix");
  std::vector<boost::multiprecision::cpp_int> y(static_cast<std::size_t>(m.rows));
  for (int r = 0; r < m.rows; ++r) {
    boost::multiprecision::cpp_int minor = exact_determinant(m.without_row(r));
    y[static_cast<std::size_t>(r)] = (r % 2 == 0) ? minor : boost::multiprecision::cpp_int(-minor);
  }
  return y;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_RANK_HPP
