#pragma once

// Divisors of eta quotients g_r = prod eta_delta^{r_delta} and Ligozat's
// criterion for g_r to be a modular function on X0(N).

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cuspgate/core_arith.hpp"
#include "cuspgate/cusp_lattice.hpp"

namespace cuspgate {

/// Exponent family of an eta quotient, one entry per divisor of the level.
using EtaExponents = EtaVector;

/// Order of vanishing of eta_M at a cusp of X0(N) with denominator d:
/// N gcd(d, M)^2 / (24 d gcd(d, N/d) M). Valid for any N >= 1.
inline Rat eta_order_at_cusp(std::uint64_t n, std::uint64_t m, std::uint64_t d) {
  if (n == 0 || m == 0 || d == 0) throw std::domain_error("eta_order_at_cusp: arguments must be positive");
  if (n % m != 0) throw std::domain_error("eta_order_at_cusp: M must divide N");
  if (n % d != 0) throw std::domain_error("eta_order_at_cusp: d must divide N");
  const BigInt dp = std::gcd(d, m);
  const BigInt t = std::gcd(d, n / d);
  return Rat(BigInt(n) * dp * dp, 24 * BigInt(d) * t * BigInt(m));
}

/// Divisor of g_r on X0(N), assembled cusp by cusp from eta_order_at_cusp.
inline CuspDivisor divisor_of_eta_quotient(const EtaExponents& r) {
  const auto& level = r.level();
  CuspDivisor div(level);
  for (std::size_t cm = 0; cm < level.cusp_count(); ++cm) {
    const std::uint64_t d = level.divisor(cm);
    Rat total;
    for (std::size_t em = 0; em < level.cusp_count(); ++em) {
      if (r[em].is_zero()) continue;
      total += r[em] * eta_order_at_cusp(level.N(), level.divisor(em), d);
    }
    div[cm] = total;
  }
  return div;
}

struct LigozatVerdict {
  bool accepted = false;
  /// Violated condition numbers, 1..5, in increasing order.
  std::vector<int> failed;
};

/// Ligozat's five conditions:
///   1. every r_delta is an integer;
///   2. sum r_delta * delta == 0 (mod 24);
///   3. sum r_delta * N/delta == 0 (mod 24);
///   4. sum r_delta == 0;
///   5. prod delta^{r_delta} is the square of a rational.
/// Condition 5 is only evaluated for integral exponents.
inline LigozatVerdict ligozat_check(const EtaExponents& r) {
  const auto& level = r.level();
  LigozatVerdict verdict;
  const bool integral = r.is_integral();
  if (!integral) verdict.failed.push_back(1);

  Rat weighted, coweighted, total;
  for (std::size_t m = 0; m < r.size(); ++m) {
    const std::uint64_t delta = level.divisor(m);
    weighted += r[m] * Rat(BigInt(delta));
    coweighted += r[m] * Rat(BigInt(level.N() / delta));
    total += r[m];
  }
  auto divisible_by_24 = [](const Rat& x) { return x.is_integer() && x.numerator() % 24 == 0; };
  if (!divisible_by_24(weighted)) verdict.failed.push_back(2);
  if (!divisible_by_24(coweighted)) verdict.failed.push_back(3);
  if (!total.is_zero()) verdict.failed.push_back(4);

  if (integral) {
    BigInt up = 1, down = 1;
    for (std::size_t m = 0; m < r.size(); ++m) {
      const BigInt& e = r[m].numerator();
      const BigInt delta(level.divisor(m));
      if (e > 0) up *= pow(delta, static_cast<unsigned>(e));
      if (e < 0) down *= pow(delta, static_cast<unsigned>(-e));
    }
    if (!rational_sqrt(Rat(up, down))) verdict.failed.push_back(5);
  }
  verdict.accepted = verdict.failed.empty();
  return verdict;
}

}  // namespace cuspgate
