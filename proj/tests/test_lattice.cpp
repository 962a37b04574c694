#include <gtest/gtest.h>

#include <random>

#include "cuspgate/lattice.hpp"

using namespace cuspgate;

namespace {

IntMatrix from_rows(std::vector<std::vector<long long>> rows) {
  IntMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

// Cofactor expansion, independent of the elimination code.
BigInt laplace_det(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  BigInt total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    IntMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t k = 0, kk = 0; k < n; ++k) {
        if (k != c) minor(r - 1, kk++) = m(r, k);
      }
    }
    const BigInt term = m(0, c) * laplace_det(minor);
    total += (c % 2 == 0) ? term : BigInt(-term);
  }
  return total;
}

}  // namespace

TEST(Smith, KnownDiagonalisations) {
  EXPECT_EQ(smith_invariants(from_rows({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}})), (std::vector<BigInt>{2, 6, 12}));
  EXPECT_EQ(smith_invariants(from_rows({{4, 0}, {0, 6}})), (std::vector<BigInt>{2, 12}));
  EXPECT_TRUE(smith_invariants(from_rows({{0, 0}, {0, 0}})).empty());
  EXPECT_EQ(smith_invariants(from_rows({{2, 4}, {1, 2}})), (std::vector<BigInt>{1}));
}

TEST(Smith, DivisibilityChainAndDeterminant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 2 + iter % 4;
    IntMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m(r, c) = d(rng);
    }
    const BigInt det = laplace_det(m);
    EXPECT_EQ(determinant(m), det);
    const auto inv = smith_invariants(m);
    // only nonzero invariants are returned, so the count is the rank
    EXPECT_EQ(inv.size() == n, det != 0);
    BigInt prod = 1;
    for (std::size_t i = 0; i < inv.size(); ++i) {
      EXPECT_GT(inv[i], 0);
      if (i + 1 < inv.size()) EXPECT_EQ(inv[i + 1] % inv[i], 0);
      prod *= inv[i];
    }
    if (det != 0) EXPECT_EQ(prod, abs(det));
  }
}

TEST(Kernel, ColumnsAreInKernelAndSpanIt) {
  auto a = from_rows({{1, 2, 3, 4}, {2, 4, 6, 8}, {0, 1, 1, 1}});
  auto k = kernel_basis(a);
  EXPECT_EQ(k.cols(), 2u);
  for (std::size_t c = 0; c < k.cols(); ++c) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
      BigInt s = 0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(r, j) * k(j, c);
      EXPECT_EQ(s, 0);
    }
  }
  // a saturated basis: its Smith invariants are all 1
  for (const auto& d : smith_invariants(k)) EXPECT_EQ(d, 1);
}

TEST(Xgcd, BezoutIdentity) {
  for (long long a = -30; a <= 30; a += 7) {
    for (long long b = -25; b <= 25; b += 3) {
      auto [g, x, y] = detail::xgcd(a, b);
      EXPECT_EQ(g, gcd(a, b));
      EXPECT_EQ(a * x + b * y, g);
    }
  }
}
