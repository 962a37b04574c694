#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the tensor (Lambda) code path, the Smith form or the library's Ligozat check.

#include <cstdint>
#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cuspgate.hpp"

namespace oracle {

using cuspgate::BigInt;
using cuspgate::Rat;

/// Order of eta_M at the cusp with denominator d on X0(N), written out again.
inline Rat eta_order(std::uint64_t n, std::uint64_t m, std::uint64_t d) {
  const std::uint64_t g = std::gcd(d, m);
  return Rat(BigInt(n) * g * g, BigInt(24) * d * std::gcd(d, n / d) * m);
}

/// Solves A x = b over Q (A square, nonsingular) by Gauss-Jordan elimination.
inline std::vector<Rat> solve(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n) throw std::runtime_error("oracle::solve: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    const Rat inv = a[col][col].inverse();
    for (auto& x : a[col]) x *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const Rat f = a[r][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  return b;
}

/// Divisors of a square-free n, ascending.
inline std::vector<std::uint64_t> divisors_of(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

/// Eta exponents r (indexed like divisors_of(n)) whose quotient has divisor
/// `coeffs` (also indexed like divisors_of(n)).
inline std::vector<Rat> eta_exponents_for(std::uint64_t n, const std::vector<Rat>& coeffs) {
  const auto ds = divisors_of(n);
  std::vector<std::vector<Rat>> a(ds.size(), std::vector<Rat>(ds.size()));
  for (std::size_t c = 0; c < ds.size(); ++c) {
    for (std::size_t e = 0; e < ds.size(); ++e) a[c][e] = eta_order(n, ds[e], ds[c]);
  }
  return solve(std::move(a), coeffs);
}

/// Ligozat's conditions, written from scratch (rational square test by
/// prime-exponent parity of prod delta^{r_delta}).
inline bool ligozat(std::uint64_t n, const std::vector<Rat>& r) {
  const auto ds = divisors_of(n);
  Rat s1, s2, s3;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!r[i].is_integer()) return false;
    s1 += r[i] * Rat(BigInt(ds[i]));
    s2 += r[i] * Rat(BigInt(n / ds[i]));
    s3 += r[i];
  }
  if (!s1.is_integer() || s1.numerator() % 24 != 0) return false;
  if (!s2.is_integer() || s2.numerator() % 24 != 0) return false;
  if (!s3.is_zero()) return false;
  std::map<std::uint64_t, BigInt> exps;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::uint64_t d = ds[i];
    for (std::uint64_t p = 2; p <= d; ++p) {
      while (d % p == 0) {
        exps[p] += r[i].numerator();
        d /= p;
      }
    }
  }
  for (const auto& [p, e] : exps) {
    if (e % 2 != 0) return false;
  }
  return true;
}

/// Smallest n >= 1 with n * D principal, by direct search up to `cap`.
inline std::optional<std::uint64_t> minimal_order(std::uint64_t level, const std::vector<Rat>& coeffs,
                                                  std::uint64_t cap = 100000) {
  const auto r = eta_exponents_for(level, coeffs);
  for (std::uint64_t k = 1; k <= cap; ++k) {
    std::vector<Rat> rk;
    for (const auto& x : r) rk.push_back(x * Rat(BigInt(k)));
    if (ligozat(level, rk)) return k;
  }
  return std::nullopt;
}

/// x^2 == a (mod m) solvable, by exhaustion.
inline bool is_square_mod(long long a, long long m) {
  const long long r = ((a % m) + m) % m;
  for (long long x = 0; x < m; ++x) {
    if (x * x % m == r) return true;
  }
  return false;
}

/// #E(F_p) for small p by enumerating all affine points.
inline long long count_points(const cuspgate::WeierstrassModel& e, long long p) {
  long long count = 1;
  for (long long x = 0; x < p; ++x) {
    for (long long y = 0; y < p; ++y) {
      const BigInt v = BigInt(y) * y + e.a1 * x * y + e.a3 * y - (BigInt(x) * x * x + e.a2 * x * x + e.a4 * x + e.a6);
      if (cuspgate::mod(v, p) == 0) ++count;
    }
  }
  return count;
}

/// Rational roots of 4x^3 + b2 x^2 + 2 b4 x + b6 via the rational root theorem.
inline std::vector<Rat> two_torsion_roots(const cuspgate::WeierstrassModel& e) {
  const auto b = cuspgate::b_invariants(e);
  auto f = [&](const Rat& x) { return Rat(4) * x * x * x + Rat(b.b2) * x * x + Rat(2 * b.b4) * x + Rat(b.b6); };
  std::vector<Rat> out;
  if (b.b6 == 0) {
    out.push_back(0);
    // 4x^2 + b2 x + 2 b4: numerators divide 2b4, denominators divide 4
    if (b.b4 == 0) {
      if (b.b2 != 0) out.push_back(Rat(-b.b2, 4));
    } else {
      for (const auto& d : cuspgate::divisors(cuspgate::abs(2 * b.b4))) {
        for (int den : {1, 2, 4}) {
          for (int s : {1, -1}) {
            Rat x(s * d, den);
            if (f(x).is_zero()) out.push_back(x);
          }
        }
      }
    }
  } else {
    for (const auto& d : cuspgate::divisors(cuspgate::abs(b.b6))) {
      for (int den : {1, 2, 4}) {
        for (int s : {1, -1}) {
          Rat x(s * d, den);
          if (f(x).is_zero()) out.push_back(x);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Number of elements g of prod Z/d_i with m g = 0.
inline BigInt killed_by(const std::vector<BigInt>& invariants, const BigInt& m) {
  BigInt c = 1;
  for (const auto& d : invariants) c *= cuspgate::gcd(d, m);
  return c;
}

}  // namespace oracle
