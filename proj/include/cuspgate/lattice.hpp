#pragma once

// Dense integer matrices with the three lattice routines the cuspidal group
// computation needs: integer kernel bases, Smith invariant factors and an
// exact determinant.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "cuspgate/core_arith.hpp"

namespace cuspgate {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }
  // row[dst] += k * row[src]
  void add_row(std::size_t dst, std::size_t src, const BigInt& k) {
    if (k == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += k * (*this)(src, c);
  }
  // col[dst] += k * col[src]
  void add_col(std::size_t dst, std::size_t src, const BigInt& k) {
    if (k == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += k * (*this)(r, src);
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

namespace detail {

// Extended gcd: returns {g, x, y} with a*x + b*y = g >= 0.
inline std::tuple<BigInt, BigInt, BigInt> xgcd(const BigInt& a, const BigInt& b) {
  BigInt r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    BigInt q = r0 / r1;
    BigInt tmp = r0 - q * r1;
    r0 = std::move(r1);
    r1 = std::move(tmp);
    tmp = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(tmp);
    tmp = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(tmp);
  }
  if (r0 < 0) return {-r0, -s0, -t0};
  return {r0, s0, t0};
}

// Replaces columns (k, j) of both m and u by a unimodular combination that
// leaves gcd(m(row,k), m(row,j)) in column k and zero in column j.
inline void column_gcd_step(IntMatrix& m, IntMatrix& u, std::size_t row, std::size_t k, std::size_t j) {
  const BigInt a = m(row, k);
  const BigInt b = m(row, j);
  if (b == 0) return;
  auto [g, x, y] = xgcd(a, b);
  const BigInt ag = a / g;
  const BigInt bg = b / g;
  auto mix = [&](IntMatrix& mat) {
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      BigInt ck = mat(r, k);
      BigInt cj = mat(r, j);
      mat(r, k) = x * ck + y * cj;
      mat(r, j) = ag * cj - bg * ck;
    }
  };
  mix(m);
  mix(u);
}

}  // namespace detail

/// Basis (as columns) of the integer kernel {x in Z^n : A x = 0}.
inline IntMatrix kernel_basis(IntMatrix a) {
  const std::size_t n = a.cols();
  IntMatrix u = IntMatrix::identity(n);
  std::size_t pivot = 0;
  for (std::size_t row = 0; row < a.rows() && pivot < n; ++row) {
    for (std::size_t j = pivot + 1; j < n; ++j) detail::column_gcd_step(a, u, row, pivot, j);
    if (a(row, pivot) != 0) {
      ++pivot;
    }
  }
  IntMatrix basis(n, n - pivot);
  for (std::size_t c = pivot; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) basis(r, c - pivot) = u(r, c);
  }
  return basis;
}

/// Nonzero invariant factors d1 | d2 | ... of A (all positive).
inline std::vector<BigInt> smith_invariants(IntMatrix a) {
  std::vector<BigInt> diag;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    // Pivot on the smallest nonzero entry of the trailing block.
    bool found = false;
    std::size_t pr = t, pc = t;
    BigInt best;
    for (std::size_t r = t; r < m; ++r) {
      for (std::size_t c = t; c < n; ++c) {
        if (a(r, c) != 0 && (!found || abs(a(r, c)) < best)) {
          best = abs(a(r, c));
          pr = r;
          pc = c;
          found = true;
        }
      }
    }
    if (!found) break;
    a.swap_rows(t, pr);
    a.swap_cols(t, pc);
    for (;;) {
      bool clean = true;
      for (std::size_t r = t + 1; r < m; ++r) {
        if (a(r, t) == 0) continue;
        a.add_row(r, t, -(a(r, t) / a(t, t)));
        if (a(r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < n; ++c) {
        if (a(t, c) == 0) continue;
        a.add_col(c, t, -(a(t, c) / a(t, t)));
        if (a(t, c) != 0) clean = false;
      }
      if (clean) break;
      // Move the smallest remainder in row t / column t into the pivot.
      std::size_t br = t, bc = t;
      BigInt small = abs(a(t, t));
      for (std::size_t r = t + 1; r < m; ++r) {
        if (a(r, t) != 0 && abs(a(r, t)) < small) {
          small = abs(a(r, t));
          br = r;
          bc = t;
        }
      }
      for (std::size_t c = t + 1; c < n; ++c) {
        if (a(t, c) != 0 && abs(a(t, c)) < small) {
          small = abs(a(t, c));
          br = t;
          bc = c;
        }
      }
      a.swap_rows(t, br);
      a.swap_cols(t, bc);
    }
    diag.push_back(abs(a(t, t)));
  }
  // Diagonal to divisibility chain.
  for (std::size_t i = 0; i < diag.size(); ++i) {
    for (std::size_t j = i + 1; j < diag.size(); ++j) {
      BigInt g = gcd(diag[i], diag[j]);
      BigInt l = diag[i] / g * diag[j];
      diag[i] = g;
      diag[j] = l;
    }
  }
  return diag;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline BigInt determinant(IntMatrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && a(r, k) == 0) ++r;
      if (r == n) return 0;
      a.swap_rows(k, r);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace cuspgate
